"""
Exception hierarchy for the circulant cryptosystem.

Every error raised by the library derives from CirculantCryptoError and from
the builtin it specializes, so callers may catch either.
"""

from typing import Optional, Tuple


class CirculantCryptoError(Exception):
    """Root of all library errors"""


class FieldSpecMismatchError(CirculantCryptoError, ValueError):
    """Operands live in different fields"""


class UnsupportedFieldError(CirculantCryptoError, ValueError):
    """Field outside the supported families (p = 2, k <= 64 or odd p < 2^31, k = 1)"""


class FieldDivisionByZeroError(CirculantCryptoError, ZeroDivisionError):
    """Inverse of zero requested"""


class DimensionMismatchError(CirculantCryptoError, ValueError):
    """Circulants of different dimension combined"""


class UnsupportedDimensionError(CirculantCryptoError, ValueError):
    """Dimension violates an operation's hypothesis"""


class NotInvertibleError(CirculantCryptoError, ArithmeticError):
    """Representer polynomial shares a factor with x^d - 1"""

    def __init__(self, message: str, gcd: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.gcd = gcd


class InseparableModulusError(CirculantCryptoError, ValueError):
    """gcd(d, q) != 1, so x^d - 1 is not squarefree"""


class GeneratorGenerationError(CirculantCryptoError, RuntimeError):
    """Retry budget exhausted while sampling a generator"""


class InvalidParamsError(CirculantCryptoError, ValueError):
    """Parameter set missing validation or failing it"""


class ParamMismatchError(CirculantCryptoError, ValueError):
    """Protocol objects built over different parameter sets"""


class MessageTooLargeError(CirculantCryptoError, ValueError):
    """Message exceeds the block capacity"""


class MessageDecodeError(CirculantCryptoError, ValueError):
    """Block does not decode to a message (bad header or padding)"""


class InvalidInstanceError(CirculantCryptoError, ValueError):
    """Discrete log instance inconsistent with its stated group structure"""


class FileFormatError(CirculantCryptoError, ValueError):
    """Malformed parameter, key, or instance file"""
