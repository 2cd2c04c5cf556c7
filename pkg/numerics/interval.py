#!/usr/bin/env python3
"""
Interval - Intervallarithmetik mit Auswärtsrundung
Skalare Intervalle, Intervall-Vektoren und -Matrizen für alle Beweisschritte

Rundungsstrategie (einzige Stelle im Projekt, die Rundung kennt):
    Jede Grundoperation wird in Round-to-nearest ausgeführt. Der exakte
    Rundungsfehler wird mit fehlerfreien Transformationen (TwoSum, Dekker
    TwoProduct) bestimmt; nur wenn der Fehler in die falsche Richtung zeigt
    oder nicht exakt bestimmbar ist (Unterlauf, sehr große Beträge), wird der
    Endpunkt mit nextafter um eine Einheit nach außen geschoben.
    Damit sind exakte Ergebnisse ([1,2]+[3,4] = [4,6]) exakt und alle
    anderen höchstens ein ulp zu breit. Der Rundungsmodus der FPU wird nie
    verändert, die Operationen sind daher threadsicher.
"""

import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np


class ProverError(Exception):
    """Basisklasse aller Fehler des Beweisers"""


class IntervalError(ProverError):
    """Ungültiges Intervall oder ungültige Operation"""


class DivisionByZeroInterval(IntervalError):
    """Nenner-Intervall enthält 0"""


class DomainError(IntervalError):
    """Argument außerhalb des Definitionsbereichs"""


class IntervalOverflowError(IntervalError):
    """Ergebnis mit nicht endlicher Schranke"""


class SingularIntervalMatrix(IntervalError):
    """Determinante der Intervall-Matrix enthält 0"""


# --------------------------------------------------------------------------
# Rundungskern (numpy-Arrays und Python-Floats)
# --------------------------------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1
_SPLIT_LIMIT = 2.0 ** 995
_TINY = 2.0 ** -960
_UNIT_ROUNDOFF = 2.0 ** -53
_INF = np.inf


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a):
    c = _SPLITTER * a
    high = c - (c - a)
    return high, a - high


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _prod_exact_ok(a, b, p):
    """Dekker-Fehlerterm ist nur ohne Über-/Unterlauf exakt"""
    return ((np.abs(a) < _SPLIT_LIMIT) & (np.abs(b) < _SPLIT_LIMIT)
            & ((np.abs(p) >= _TINY) | (a == 0) | (b == 0)))


def _down(value, err, exact_ok):
    # exakter Wert = value + err, falls exact_ok
    return np.where(exact_ok & (err >= 0), value, np.nextafter(value, -_INF))


def _up(value, err, exact_ok):
    return np.where(exact_ok & (err <= 0), value, np.nextafter(value, _INF))


def _add_down(a, b):
    s, err = _two_sum(a, b)
    return _down(s, err, np.isfinite(err))


def _add_up(a, b):
    s, err = _two_sum(a, b)
    return _up(s, err, np.isfinite(err))


def _mul_down(a, b):
    p, err = _two_prod(a, b)
    return _down(p, err, _prod_exact_ok(a, b, p) & np.isfinite(err))


def _mul_up(a, b):
    p, err = _two_prod(a, b)
    return _up(p, err, _prod_exact_ok(a, b, p) & np.isfinite(err))


def _mul_both(a, b):
    p, err = _two_prod(a, b)
    ok = _prod_exact_ok(a, b, p) & np.isfinite(err)
    return _down(p, err, ok), _up(p, err, ok)


def _div_residual(a, b):
    """Quotient q und ein Wert mit dem Vorzeichen von a/b - q"""
    q = a / b
    p, err = _two_prod(q, b)
    residual = (a - p) - err
    ok = (_prod_exact_ok(q, b, p) & np.isfinite(residual)
          & ((np.abs(q) >= _TINY) | (a == 0)))
    return q, residual * np.sign(b), ok


def _div_down(a, b):
    q, sign_err, ok = _div_residual(a, b)
    return _down(q, sign_err, ok)


def _div_up(a, b):
    q, sign_err, ok = _div_residual(a, b)
    return _up(q, sign_err, ok)


def _sqrt_residual(a):
    s = np.sqrt(a)
    p, err = _two_prod(s, s)
    residual = (a - p) - err
    ok = _prod_exact_ok(s, s, p) & np.isfinite(residual)
    return s, residual, ok


def _sqrt_down(a):
    s, residual, ok = _sqrt_residual(a)
    return np.maximum(_down(s, residual, ok), 0.0)


def _sqrt_up(a):
    s, residual, ok = _sqrt_residual(a)
    return _up(s, residual, ok)


def _check_finite(lo, hi):
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise IntervalOverflowError("Intervall-Schranke nicht endlich (Überlauf)")


# --------------------------------------------------------------------------
# Skalares Intervall
# --------------------------------------------------------------------------

Number = Union[int, float]


class _EmptySet:
    """Ausgezeichnete leere Menge (Ergebnis einer disjunkten Schnittmenge)"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    is_empty = True

    def __repr__(self):
        return "EMPTY"

    def __bool__(self):
        return False


EMPTY = _EmptySet()


class Interval:
    """Abgeschlossenes Intervall [lo, hi] mit Maschinenzahl-Schranken"""

    __slots__ = ("lo", "hi")
    __array_ufunc__ = None

    is_empty = False

    def __init__(self, lo: Number, hi: Optional[Number] = None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise IntervalOverflowError(f"Nicht endliche Schranke: [{lo}, {hi}]")
        if lo > hi:
            raise IntervalError(f"Ungültiges Intervall: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval ist unveränderlich")

    def __reduce__(self):
        return (Interval, (self.lo, self.hi))

    # Konstruktion --------------------------------------------------------

    @classmethod
    def coerce(cls, value: Union["Interval", Number]) -> "Interval":
        if isinstance(value, Interval):
            return value
        if isinstance(value, (int, np.integer)) and not float(value) == value:
            # große Ganzzahl ist nicht exakt darstellbar
            return cls.from_fraction(Fraction(int(value)))
        return cls(float(value))

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Interval":
        """Engste Einschließung einer rationalen Zahl"""
        approx = float(value)
        exact = Fraction(approx)
        if exact == value:
            return cls(approx)
        if exact < value:
            return cls(approx, math.nextafter(approx, math.inf))
        return cls(math.nextafter(approx, -math.inf), approx)

    @classmethod
    def from_decimal(cls, text: str) -> "Interval":
        """Engste Einschließung einer Dezimalzahl wie '2.0316516135613893'"""
        return cls.from_fraction(Fraction(text))

    @classmethod
    def hull_of(cls, values: Iterable[Union["Interval", Number]]) -> "Interval":
        items = [cls.coerce(v) for v in values]
        if not items:
            raise IntervalError("Hülle einer leeren Menge")
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    # Eigenschaften --------------------------------------------------------

    @property
    def mid(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if not math.isfinite(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def diam(self) -> float:
        return float(_add_up(self.hi, -self.lo))

    @property
    def rad(self) -> float:
        return float(_mul_up(self.diam, 0.5))

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def is_point(self) -> bool:
        return self.lo == self.hi

    # Mengenprädikate ------------------------------------------------------

    def contains(self, value: Union["Interval", Number]) -> bool:
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi

    def __contains__(self, value) -> bool:
        return self.contains(value)

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def subset_interior(self, other: "Interval") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def intersect(self, other: "Interval"):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return EMPTY
        return Interval(lo, hi)

    def intersects(self, other: "Interval") -> bool:
        return max(self.lo, other.lo) <= min(self.hi, other.hi)

    def hull(self, other: Union["Interval", Number]) -> "Interval":
        other = Interval.coerce(other)
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def certainly_lt(self, other: Union["Interval", Number]) -> bool:
        other = Interval.coerce(other)
        return self.hi < other.lo

    def certainly_gt(self, other: Union["Interval", Number]) -> bool:
        other = Interval.coerce(other)
        return self.lo > other.hi

    def inflate(self, radius: float) -> "Interval":
        return Interval(float(_add_down(self.lo, -radius)), float(_add_up(self.hi, radius)))

    def split(self, n: int) -> List["Interval"]:
        return split(self, n)

    # Arithmetik -----------------------------------------------------------

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return sub(self, other)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return sub(other, self)

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return div(self, other)

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return div(other, self)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, (int, np.integer)) or exponent < 0:
            raise DomainError("Nur nichtnegative ganzzahlige Potenzen")
        return power(self, int(exponent))

    def sqr(self) -> "Interval":
        return power(self, 2)

    def sqrt(self) -> "Interval":
        return sqrt(self)

    # Vergleich / Darstellung ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        return f"[{self.lo!r}, {self.hi!r}]"

    def to_record(self) -> dict:
        """Bit-exakte Serialisierung (Hex) plus lesbare Dezimal-Einschließung"""
        return {
            "lo": self.lo.hex(),
            "hi": self.hi.hex(),
            "decimal": f"[{self.lo!r}, {self.hi!r}]",
        }

    @classmethod
    def from_record(cls, record: dict) -> "Interval":
        return cls(float.fromhex(record["lo"]), float.fromhex(record["hi"]))


def _coerce_or_none(value):
    if isinstance(value, Interval):
        return value
    if isinstance(value, (int, float, np.integer, np.floating)):
        return Interval.coerce(value)
    return None


# Skalare Operationen ---------------------------------------------------------

def add(a: Interval, b: Interval) -> Interval:
    lo, hi = float(_add_down(a.lo, b.lo)), float(_add_up(a.hi, b.hi))
    _check_finite(lo, hi)
    return Interval(lo, hi)


def sub(a: Interval, b: Interval) -> Interval:
    lo, hi = float(_add_down(a.lo, -b.hi)), float(_add_up(a.hi, -b.lo))
    _check_finite(lo, hi)
    return Interval(lo, hi)


def neg(a: Interval) -> Interval:
    return -a


def mul(a: Interval, b: Interval) -> Interval:
    pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    lo = min(float(_mul_down(x, y)) for x, y in pairs)
    hi = max(float(_mul_up(x, y)) for x, y in pairs)
    _check_finite(lo, hi)
    return Interval(lo, hi)


def div(a: Interval, b: Interval) -> Interval:
    if b.lo <= 0.0 <= b.hi:
        raise DivisionByZeroInterval(f"Division durch {b} (enthält 0)")
    pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    with np.errstate(all="ignore"):
        lo = min(float(_div_down(x, y)) for x, y in pairs)
        hi = max(float(_div_up(x, y)) for x, y in pairs)
    _check_finite(lo, hi)
    return Interval(lo, hi)


def sqrt(a: Interval) -> Interval:
    if a.lo < 0.0:
        raise DomainError(f"Wurzel aus {a} (negative untere Schranke)")
    return Interval(float(_sqrt_down(a.lo)), float(_sqrt_up(a.hi)))


def power(a: Interval, n: int) -> Interval:
    """Ganzzahlige Potenz mit korrekter Behandlung gerader Exponenten"""
    if n == 0:
        return Interval(1.0)
    if n == 1:
        return a

    def point_power(v: float) -> Interval:
        result = Interval(v)
        base = Interval(v)
        for _ in range(n - 1):
            result = mul(result, base)
        return result

    low, high = point_power(a.lo), point_power(a.hi)
    if n % 2 == 1 or a.lo >= 0.0:
        return Interval(min(low.lo, high.lo), max(low.hi, high.hi))
    if a.hi <= 0.0:
        return Interval(high.lo, low.hi)
    return Interval(0.0, max(low.hi, high.hi))


def inv_sqrt2() -> Interval:
    """Engste Einschließung von 2^(-1/2)"""
    return sqrt(Interval(0.5))


def contains(a: Interval, x: Union[Interval, Number]) -> bool:
    return a.contains(x)


def subset_interior(a: Interval, b: Interval) -> bool:
    return a.subset_interior(b)


def intersect(a: Interval, b: Interval):
    return a.intersect(b)


def hull(a: Interval, b: Interval) -> Interval:
    return a.hull(b)


def mid(a: Interval) -> float:
    return a.mid


def diam(a: Interval) -> float:
    return a.diam


def split(a: Interval, n: int) -> List[Interval]:
    """n zusammenhängende Teilintervalle; Nachbarn teilen genau einen Endpunkt"""
    if n < 1:
        raise IntervalError("split benötigt n >= 1")
    points = [a.lo]
    for i in range(1, n):
        p = a.lo + (a.hi - a.lo) * (i / n)
        points.append(min(max(p, points[-1]), a.hi))
    points.append(a.hi)
    return [Interval(points[i], points[i + 1]) for i in range(n)]


# --------------------------------------------------------------------------
# Intervall-Arrays (numpy)
# --------------------------------------------------------------------------

ArrayLike = Union["IntervalArray", Interval, np.ndarray, Sequence, Number]


class IntervalArray:
    """Array von Intervallen mit getrennten lo/hi-Feldern"""

    __array_ufunc__ = None

    def __init__(self, lo, hi=None, check: bool = True):
        lo = np.array(lo, dtype=np.float64)
        hi = lo.copy() if hi is None else np.array(hi, dtype=np.float64)
        if lo.shape != hi.shape:
            lo, hi = np.broadcast_arrays(lo, hi)
            lo, hi = lo.copy(), hi.copy()
        if check:
            _check_finite(lo, hi)
            if np.any(lo > hi):
                raise IntervalError("Ungültiges Intervall-Array (lo > hi)")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi

    # Konstruktion --------------------------------------------------------

    @classmethod
    def point(cls, values) -> "IntervalArray":
        return cls(values)

    @classmethod
    def zeros(cls, shape) -> "IntervalArray":
        z = np.zeros(shape)
        return cls(z, z)

    @classmethod
    def from_intervals(cls, items) -> "IntervalArray":
        """Aus (verschachtelter) Liste von Intervallen bzw. Zahlen"""
        def walk(node, pick):
            if isinstance(node, Interval):
                return pick(node)
            if isinstance(node, (int, float, np.integer, np.floating)):
                return float(node)
            return [walk(child, pick) for child in node]

        items = [i.to_list() if isinstance(i, IntervalArray) else i for i in items] \
            if isinstance(items, (list, tuple)) else items
        lo = walk(items, lambda iv: iv.lo)
        hi = walk(items, lambda iv: iv.hi)
        return cls(lo, hi)

    @classmethod
    def coerce(cls, value: ArrayLike) -> "IntervalArray":
        if isinstance(value, IntervalArray):
            return value
        if isinstance(value, Interval):
            return cls(value.lo, value.hi)
        if isinstance(value, np.ndarray):
            return cls(value)
        if isinstance(value, (int, float, np.integer, np.floating)):
            return cls(float(value))
        return cls.from_intervals(value)

    def _wrap(self, lo, hi) -> "IntervalArray":
        return self.__class__._rewrap(lo, hi)

    @classmethod
    def _rewrap(cls, lo, hi) -> "IntervalArray":
        _check_finite(lo, hi)
        return IntervalArray(lo, hi, check=False)

    # Form -----------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.lo.shape

    @property
    def ndim(self) -> int:
        return self.lo.ndim

    def __len__(self) -> int:
        return self.lo.shape[0]

    def __getitem__(self, index):
        lo, hi = self.lo[index], self.hi[index]
        if np.ndim(lo) == 0:
            return Interval(float(lo), float(hi))
        return IntervalArray(lo, hi, check=False)

    def with_item(self, index, value: Union[Interval, Number]) -> "IntervalArray":
        value = Interval.coerce(value)
        lo, hi = self.lo.copy(), self.hi.copy()
        lo[index], hi[index] = value.lo, value.hi
        return IntervalArray(lo, hi, check=False)

    def reshape(self, *shape) -> "IntervalArray":
        return IntervalArray(self.lo.reshape(*shape), self.hi.reshape(*shape), check=False)

    def transpose(self, *axes) -> "IntervalArray":
        return IntervalArray(self.lo.transpose(*axes), self.hi.transpose(*axes), check=False)

    @property
    def T(self) -> "IntervalArray":
        return self.transpose()

    def to_list(self):
        def build(lo, hi):
            if np.ndim(lo) == 0:
                return Interval(float(lo), float(hi))
            return [build(l, h) for l, h in zip(lo, hi)]
        return build(self.lo, self.hi)

    def components(self) -> List[Interval]:
        return [Interval(float(l), float(h)) for l, h in zip(self.lo.ravel(), self.hi.ravel())]

    # Kennzahlen -----------------------------------------------------------

    def mid(self) -> np.ndarray:
        with np.errstate(all="ignore"):
            m = 0.5 * (self.lo + self.hi)
            m = np.where(np.isfinite(m), m, 0.5 * self.lo + 0.5 * self.hi)
        return np.clip(m, self.lo, self.hi)

    def diam(self) -> np.ndarray:
        return _add_up(self.hi, -self.lo)

    def rad(self) -> np.ndarray:
        return _mul_up(self.diam(), 0.5)

    def mag(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def max_diam(self) -> float:
        return float(np.max(self.diam())) if self.lo.size else 0.0

    def contains_zero(self) -> np.ndarray:
        return (self.lo <= 0.0) & (self.hi >= 0.0)

    # Mengen ---------------------------------------------------------------

    def contains(self, other: ArrayLike) -> bool:
        other = IntervalArray.coerce(other)
        return bool(np.all(self.lo <= other.lo) and np.all(other.hi <= self.hi))

    def subset(self, other: ArrayLike) -> bool:
        return IntervalArray.coerce(other).contains(self)

    def subset_interior(self, other: ArrayLike) -> bool:
        other = IntervalArray.coerce(other)
        return bool(np.all(other.lo < self.lo) and np.all(self.hi < other.hi))

    def intersects(self, other: ArrayLike) -> bool:
        other = IntervalArray.coerce(other)
        return bool(np.all(np.maximum(self.lo, other.lo) <= np.minimum(self.hi, other.hi)))

    def intersect(self, other: ArrayLike):
        other = IntervalArray.coerce(other)
        lo, hi = np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            return EMPTY
        return self._wrap(lo, hi)

    def hull(self, other: ArrayLike) -> "IntervalArray":
        other = IntervalArray.coerce(other)
        return self._wrap(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def inflate(self, absolute: float = 0.0, relative: float = 0.0) -> "IntervalArray":
        r = _add_up(_mul_up(self.rad(), relative), absolute)
        return self._wrap(_add_down(self.lo, -r), _add_up(self.hi, r))

    def centered(self) -> Tuple[np.ndarray, "IntervalArray"]:
        """Zerlegung x = m + (x - m) mit Punkt m"""
        m = self.mid()
        return m, self - m

    # Arithmetik -----------------------------------------------------------

    def __neg__(self):
        return self._wrap(-self.hi, -self.lo)

    def __add__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        with np.errstate(all="ignore"):
            return self._wrap(_add_down(self.lo, other.lo), _add_up(self.hi, other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        with np.errstate(all="ignore"):
            return self._wrap(_add_down(self.lo, -other.hi), _add_up(self.hi, -other.lo))

    def __rsub__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        with np.errstate(all="ignore"):
            if np.array_equal(other.lo, other.hi) and other.lo.size <= self.lo.size:
                return self._scale(other.lo)
            combos = ((self.lo, other.lo), (self.lo, other.hi),
                      (self.hi, other.lo), (self.hi, other.hi))
            lo, hi = _mul_both(*combos[0])
            for a, b in combos[1:]:
                down, up = _mul_both(a, b)
                lo = np.minimum(lo, down)
                hi = np.maximum(hi, up)
        return self._wrap(lo, hi)

    __rmul__ = __mul__

    def _scale(self, factor: np.ndarray) -> "IntervalArray":
        """Multiplikation mit Punktwerten (halbe Arbeit)"""
        a = np.where(factor >= 0, self.lo, self.hi)
        b = np.where(factor >= 0, self.hi, self.lo)
        return self._wrap(_mul_down(a, factor), _mul_up(b, factor))

    def __truediv__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        if np.any(other.contains_zero()):
            raise DivisionByZeroInterval("Division durch Intervall mit 0")
        with np.errstate(all="ignore"):
            combos = ((self.lo, other.lo), (self.lo, other.hi),
                      (self.hi, other.lo), (self.hi, other.hi))
            lo = _div_down(*combos[0])
            hi = _div_up(*combos[0])
            for a, b in combos[1:]:
                lo = np.minimum(lo, _div_down(a, b))
                hi = np.maximum(hi, _div_up(a, b))
        return self._wrap(lo, hi)

    def __rtruediv__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        return other / self

    def sqr(self) -> "IntervalArray":
        with np.errstate(all="ignore"):
            lo2_dn, lo2_up = _mul_down(self.lo, self.lo), _mul_up(self.lo, self.lo)
            hi2_dn, hi2_up = _mul_down(self.hi, self.hi), _mul_up(self.hi, self.hi)
        straddle = (self.lo < 0) & (self.hi > 0)
        lo = np.where(self.lo >= 0, lo2_dn, hi2_dn)
        lo = np.where(straddle, 0.0, lo)
        hi = np.maximum(lo2_up, hi2_up)
        return self._wrap(lo, hi)

    def sqrt(self) -> "IntervalArray":
        if np.any(self.lo < 0):
            raise DomainError("Wurzel aus negativem Intervall")
        return self._wrap(_sqrt_down(self.lo), _sqrt_up(self.hi))

    def sum(self, axis=None) -> "IntervalArray":
        """Rigorose Summe: float-Summe plus Fehlerschranke 2(m+1)u·Σ|a|"""
        if axis is None:
            lo_flat, hi_flat = self.lo.ravel(), self.hi.ravel()
            return IntervalArray(lo_flat, hi_flat, check=False).sum(axis=0)
        m = self.lo.shape[axis]
        if m == 0:
            shape = np.delete(np.array(self.lo.shape), axis)
            return IntervalArray.zeros(tuple(shape))
        if m == 1:
            return self._wrap(np.take(self.lo, 0, axis=axis), np.take(self.hi, 0, axis=axis))
        gamma = 2.0 * (m + 1) * _UNIT_ROUNDOFF
        with np.errstate(all="ignore"):
            s_lo = np.sum(self.lo, axis=axis)
            s_hi = np.sum(self.hi, axis=axis)
            e_lo = gamma * np.sum(np.abs(self.lo), axis=axis)
            e_hi = gamma * np.sum(np.abs(self.hi), axis=axis)
            # e == 0: nur Nullen bzw. subnormale Summanden, Summe exakt
            lo = np.where(e_lo > 0, np.nextafter(s_lo - e_lo, -_INF), s_lo)
            hi = np.where(e_hi > 0, np.nextafter(s_hi + e_hi, _INF), s_hi)
        return self._wrap(lo, hi)

    def __matmul__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        return matmul(self, other)

    def __rmatmul__(self, other):
        other = _coerce_array(other)
        if other is None:
            return NotImplemented
        return matmul(other, self)

    # Darstellung ----------------------------------------------------------

    def __repr__(self):
        return f"{self.__class__.__name__}(lo={self.lo.tolist()}, hi={self.hi.tolist()})"

    def to_record(self) -> list:
        def build(lo, hi):
            if np.ndim(lo) == 0:
                return Interval(float(lo), float(hi)).to_record()
            return [build(l, h) for l, h in zip(lo, hi)]
        return build(self.lo, self.hi)

    @classmethod
    def from_record(cls, record) -> "IntervalArray":
        def walk(node, key):
            if isinstance(node, dict):
                return float.fromhex(node[key])
            return [walk(child, key) for child in node]
        return cls(walk(record, "lo"), walk(record, "hi"))


def _coerce_array(value) -> Optional[IntervalArray]:
    if isinstance(value, IntervalArray):
        return value
    if isinstance(value, Interval):
        return IntervalArray(value.lo, value.hi, check=False)
    if isinstance(value, (np.ndarray, int, float, np.integer, np.floating)):
        return IntervalArray(value)
    return None


def matmul(a: IntervalArray, b: IntervalArray) -> IntervalArray:
    """Matrix-Produkt (2D@2D, 2D@1D, 1D@2D) mit rigoroser Summation"""
    if a.ndim == 2 and b.ndim == 2:
        prod = IntervalArray(a.lo[:, :, None], a.hi[:, :, None], check=False) * \
            IntervalArray(b.lo[None, :, :], b.hi[None, :, :], check=False)
        return prod.sum(axis=1)
    if a.ndim == 2 and b.ndim == 1:
        prod = a * IntervalArray(b.lo[None, :], b.hi[None, :], check=False)
        return prod.sum(axis=1)
    if a.ndim == 1 and b.ndim == 2:
        prod = IntervalArray(a.lo[:, None], a.hi[:, None], check=False) * b
        return prod.sum(axis=0)
    if a.ndim == 1 and b.ndim == 1:
        return (a * b).sum(axis=0)
    raise IntervalError(f"matmul für Dimensionen {a.ndim}/{b.ndim} nicht unterstützt")


class IntervalVector(IntervalArray):
    """Intervall-Vektor (Dimension 2–5 im Beweis)"""

    def __init__(self, lo, hi=None, check: bool = True):
        super().__init__(lo, hi, check)
        if self.lo.ndim != 1:
            raise IntervalError("IntervalVector muss eindimensional sein")

    @classmethod
    def _rewrap(cls, lo, hi):
        _check_finite(lo, hi)
        if np.ndim(lo) == 1:
            return IntervalVector(lo, hi, check=False)
        return IntervalArray(lo, hi, check=False)

    @classmethod
    def of(cls, *items: Union[Interval, Number]) -> "IntervalVector":
        ivs = [Interval.coerce(i) for i in items]
        return cls([i.lo for i in ivs], [i.hi for i in ivs])

    @classmethod
    def coerce(cls, value) -> "IntervalVector":
        if isinstance(value, IntervalVector):
            return value
        arr = IntervalArray.coerce(value)
        return cls(arr.lo, arr.hi, check=False)


class IntervalMatrix(IntervalArray):
    """Intervall-Matrix (quadratisch: 1, 2, 4 oder 5 im Beweis)"""

    def __init__(self, lo, hi=None, check: bool = True):
        super().__init__(lo, hi, check)
        if self.lo.ndim != 2:
            raise IntervalError("IntervalMatrix muss zweidimensional sein")

    @classmethod
    def _rewrap(cls, lo, hi):
        _check_finite(lo, hi)
        if np.ndim(lo) == 2:
            return IntervalMatrix(lo, hi, check=False)
        return IntervalArray(lo, hi, check=False)

    @classmethod
    def coerce(cls, value) -> "IntervalMatrix":
        if isinstance(value, IntervalMatrix):
            return value
        arr = IntervalArray.coerce(value)
        return cls(arr.lo, arr.hi, check=False)

    @classmethod
    def identity(cls, n: int) -> "IntervalMatrix":
        return cls(np.eye(n))


def as_vector(value: IntervalArray) -> IntervalVector:
    return IntervalVector.coerce(value)


def as_matrix(value: IntervalArray) -> IntervalMatrix:
    return IntervalMatrix.coerce(value)


def mat_inverse(A: IntervalArray) -> IntervalMatrix:
    """Einschließung aller Inversen {M^-1 : M in A} für Dimension 1 und 2"""
    A = IntervalMatrix.coerce(A)
    n, m = A.shape
    if n != m or n not in (1, 2):
        raise IntervalError(f"mat_inverse nur für 1x1 und 2x2, nicht {n}x{m}")
    if n == 1:
        a = A[0, 0]
        if a.contains_zero():
            raise SingularIntervalMatrix(f"Singuläre 1x1-Matrix {a}")
        inv = div(Interval(1.0), a)
        return IntervalMatrix([[inv.lo]], [[inv.hi]])
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    det = a * d - b * c
    if det.contains_zero():
        raise SingularIntervalMatrix(f"Determinante {det} enthält 0")
    entries = [[d / det, -b / det], [-c / det, a / det]]
    return IntervalMatrix([[e.lo for e in row] for row in entries],
                          [[e.hi for e in row] for row in entries])
