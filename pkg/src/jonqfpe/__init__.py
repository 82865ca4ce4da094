"""Format-preserving block cipher over Z/NZ from triangular automorphisms of affine spaces."""

from .cipher import CipherKey, decrypt, encrypt, identity_key, key_parse, key_serialize, keygen
from .codec import Factorization, crt_combine, crt_split, factorization_build, from_digits, to_digits
from .field import TriangularPolynomial, mod_inverse, monomial_count, poly_eval
from .jonquieres import (
    JonquieresAutomorphism,
    jonq_apply,
    jonq_invert_apply,
    jonq_inverse_key,
    jonq_validate,
    reversal,
)

__version__ = "0.1.0"
