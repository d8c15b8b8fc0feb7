//! GF(2^64) arithmetic and the vertex orderings built on it.
//!
//! Field elements are 64-bit words read as polynomials over GF(2), reduced
//! modulo `x^64 + x^4 + x^3 + x + 1`. That polynomial is a stable part of the
//! contract: an in-database `axb` UDF must use the same one to agree bit for
//! bit. Ordering of field elements (for `min`) is plain unsigned integer order.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::VertexId;

/// Low 64 bits of the reduction polynomial (`x^4 + x^3 + x + 1`).
pub const REDUCTION_POLY: u64 = 0x1B;

/// Human-readable form of the reduction polynomial, for docs and emitted SQL.
pub const REDUCTION_POLY_TEXT: &str = "x^64 + x^4 + x^3 + x + 1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("affine key has zero multiplier")]
    ZeroMultiplier,
    #[error("vertex {0} has no entry in the random key table")]
    MissingVertex(VertexId),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf64(pub u64);

impl Gf64 {
    pub const ZERO: Gf64 = Gf64(0);
    pub const ONE: Gf64 = Gf64(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse via `a^(2^64 - 2)`. Zero maps to zero.
    pub fn inverse(self) -> Gf64 {
        // 2^64 - 2 = 0b111...110
        let mut result = Gf64::ONE;
        let mut base = self;
        let mut exp: u64 = u64::MAX - 1;
        while exp != 0 {
            if exp & 1 == 1 {
                result = gf_mul(result, base);
            }
            base = gf_mul(base, base);
            exp >>= 1;
        }
        result
    }
}

impl fmt::Debug for Gf64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf64({:#018x})", self.0)
    }
}

impl std::ops::Add for Gf64 {
    type Output = Gf64;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf64) -> Gf64 {
        Gf64(self.0 ^ rhs.0)
    }
}

impl std::ops::Mul for Gf64 {
    type Output = Gf64;
    fn mul(self, rhs: Gf64) -> Gf64 {
        gf_mul(self, rhs)
    }
}

/// Shift-and-add multiplication, one bit of `b` per step with reduction at
/// every shift. Slow; kept as the reference the fast path is checked against.
pub fn gf_mul_reference(a: Gf64, b: Gf64) -> Gf64 {
    let (mut a, mut b) = (a.0, b.0);
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        let carry = a >> 63;
        a <<= 1;
        if carry == 1 {
            a ^= REDUCTION_POLY;
        }
        b >>= 1;
    }
    Gf64(acc)
}

/// Carry-less 64x64 -> 128 product using a 4-bit window table.
fn clmul_windowed(a: u64, b: u64) -> u128 {
    let mut table = [0u128; 16];
    let a = a as u128;
    for i in 1..16usize {
        table[i] = if i & 1 == 1 {
            table[i - 1] ^ a
        } else {
            table[i >> 1] << 1
        };
    }
    let mut acc = 0u128;
    for nibble in (0..16).rev() {
        acc <<= 4;
        acc ^= table[((b >> (nibble * 4)) & 0xF) as usize];
    }
    acc
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq", enable = "sse2")]
unsafe fn clmul_pclmul(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_cvtsi64_si128, _mm_storeu_si128};
    let prod = _mm_clmulepi64_si128(_mm_cvtsi64_si128(a as i64), _mm_cvtsi64_si128(b as i64), 0);
    let mut out = 0u128;
    _mm_storeu_si128((&mut out as *mut u128).cast(), prod);
    out
}

fn clmul(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { clmul_pclmul(a, b) };
        }
    }
    clmul_windowed(a, b)
}

/// Folds a 128-bit carry-less product back into the field.
fn reduce(product: u128) -> u64 {
    let lo = product as u64;
    let hi = (product >> 64) as u64;
    // hi * (x^4 + x^3 + x + 1); the bits pushed past x^63 are folded once more.
    let overflow = (hi >> 60) ^ (hi >> 61) ^ (hi >> 63);
    let folded = hi ^ (hi << 1) ^ (hi << 3) ^ (hi << 4);
    let over = overflow ^ (overflow << 1) ^ (overflow << 3) ^ (overflow << 4);
    lo ^ folded ^ over
}

/// Field product.
pub fn gf_mul(a: Gf64, b: Gf64) -> Gf64 {
    Gf64(reduce(clmul(a.0, b.0)))
}

/// Same product without the hardware path.
pub fn gf_mul_portable(a: Gf64, b: Gf64) -> Gf64 {
    Gf64(reduce(clmul_windowed(a.0, b.0)))
}

/// The affine bijection `x -> A*x + B`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineKey {
    a: Gf64,
    b: Gf64,
}

impl fmt::Debug for AffineKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineKey(A={:#x}, B={:#x})", self.a.0, self.b.0)
    }
}

impl AffineKey {
    pub const IDENTITY: AffineKey = AffineKey {
        a: Gf64::ONE,
        b: Gf64::ZERO,
    };

    pub fn new(a: u64, b: u64) -> Result<Self, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroMultiplier);
        }
        Ok(AffineKey {
            a: Gf64(a),
            b: Gf64(b),
        })
    }

    pub fn a(&self) -> Gf64 {
        self.a
    }

    pub fn b(&self) -> Gf64 {
        self.b
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        (gf_mul(self.a, Gf64(x)) + self.b).0
    }
}

/// `A*x + B` for a key given as raw parts. Fails on `A = 0`.
pub fn axb(a: Gf64, x: Gf64, b: Gf64) -> Result<Gf64, FieldError> {
    if a.is_zero() {
        return Err(FieldError::ZeroMultiplier);
    }
    Ok(gf_mul(a, x) + b)
}

/// The key of the inverse map: `(A^-1, A^-1 * B)`. Subtraction is addition here.
pub fn invert_key(key: &AffineKey) -> AffineKey {
    let inv = key.a.inverse();
    AffineKey {
        a: inv,
        b: gf_mul(inv, key.b),
    }
}

/// `outer ∘ inner`: `(outer.A * inner.A, outer.A * inner.B + outer.B)`.
pub fn compose_keys(outer: &AffineKey, inner: &AffineKey) -> AffineKey {
    AffineKey {
        a: gf_mul(outer.a, inner.a),
        b: gf_mul(outer.a, inner.b) + outer.b,
    }
}

fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

/// Uniform key for `(seed, round)`: A over nonzero elements, B over all.
pub fn sample_key(seed: u64, round: u64) -> AffineKey {
    let mut rng = round_rng(seed, round);
    let a = loop {
        let a: u64 = rng.gen();
        if a != 0 {
            break a;
        }
    };
    AffineKey {
        a: Gf64(a),
        b: Gf64(rng.gen()),
    }
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const FEISTEL_ROUNDS: usize = 4;

/// Balanced 4-round Feistel network over the two 32-bit halves of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeistelPermutation {
    round_keys: [u64; FEISTEL_ROUNDS],
}

impl FeistelPermutation {
    pub fn new(seed: u64) -> Self {
        Self::for_round(seed, 0)
    }

    pub fn for_round(seed: u64, round: u64) -> Self {
        let mut rng = round_rng(seed ^ 0x6665_6973_7465_6c00, round);
        FeistelPermutation {
            round_keys: rng.gen(),
        }
    }

    fn f(key: u64, half: u32) -> u32 {
        mix64(key ^ half as u64) as u32
    }

    pub fn permute(&self, x: u64) -> u64 {
        let (mut left, mut right) = ((x >> 32) as u32, x as u32);
        for &k in &self.round_keys {
            (left, right) = (right, left ^ Self::f(k, right));
        }
        ((left as u64) << 32) | right as u64
    }

    pub fn invert(&self, y: u64) -> u64 {
        let (mut left, mut right) = ((y >> 32) as u32, y as u32);
        for &k in self.round_keys.iter().rev() {
            (left, right) = (right ^ Self::f(k, left), left);
        }
        ((left as u64) << 32) | right as u64
    }
}

/// Stored per-vertex random keys, resampled until pairwise distinct.
#[derive(Clone, Debug)]
pub struct RandomKeyTable {
    keys: HashMap<VertexId, u64>,
}

impl RandomKeyTable {
    /// Draws keys for `vertices` (iteration order matters for determinism).
    pub fn generate(vertices: &[VertexId], seed: u64, round: u64) -> Self {
        let mut rng = round_rng(seed ^ 0x7265_616c_7300_0000, round);
        let mut used = std::collections::HashSet::with_capacity(vertices.len());
        let mut keys = HashMap::with_capacity(vertices.len());
        for &v in vertices {
            let k = loop {
                let k: u64 = rng.gen();
                if used.insert(k) {
                    break k;
                }
            };
            keys.insert(v, k);
        }
        RandomKeyTable { keys }
    }

    /// Keys from an explicit injective assignment, e.g. a shuffled rank.
    pub fn from_pairs<I: IntoIterator<Item = (VertexId, u64)>>(pairs: I) -> Self {
        RandomKeyTable {
            keys: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, v: VertexId) -> Result<u64, FieldError> {
        self.keys
            .get(&v)
            .copied()
            .ok_or(FieldError::MissingVertex(v))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Which ordering to draw each round. Paired with a master seed in the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderingFamily {
    /// Identity order; reproduces the unrandomised worst cases.
    MinId,
    /// Random reals, realised as stored distinct 64-bit keys.
    RandomKeys,
    /// `A*x + B` over GF(2^64).
    Affine,
    /// Keyed 64-bit Feistel permutation.
    KeyedPermutation,
}

impl OrderingFamily {
    /// The round-`round` ordering for the given live vertex set. Only
    /// [`OrderingFamily::RandomKeys`] looks at `vertices`.
    pub fn instantiate(self, seed: u64, round: u64, vertices: &[VertexId]) -> VertexOrder {
        match self {
            OrderingFamily::MinId => VertexOrder::MinId,
            OrderingFamily::RandomKeys => {
                VertexOrder::RandomKeys(RandomKeyTable::generate(vertices, seed, round))
            }
            OrderingFamily::Affine => VertexOrder::Affine(sample_key(seed, round)),
            OrderingFamily::KeyedPermutation => {
                VertexOrder::KeyedPermutation(FeistelPermutation::for_round(seed, round))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrderingFamily::MinId => "minid",
            OrderingFamily::RandomKeys => "random",
            OrderingFamily::Affine => "affine",
            OrderingFamily::KeyedPermutation => "keyed",
        }
    }
}

/// One round's concrete ordering `h_i`.
#[derive(Clone, Debug)]
pub enum VertexOrder {
    MinId,
    RandomKeys(RandomKeyTable),
    Affine(AffineKey),
    KeyedPermutation(FeistelPermutation),
}

impl VertexOrder {
    /// `h_i(v)`; injective over the vertices the order was built for.
    #[inline]
    pub fn order_key(&self, v: VertexId) -> Result<u64, FieldError> {
        Ok(match self {
            VertexOrder::MinId => v,
            VertexOrder::RandomKeys(table) => table.get(v)?,
            VertexOrder::Affine(key) => key.apply(v),
            VertexOrder::KeyedPermutation(p) => p.permute(v),
        })
    }

    /// Whether representatives are stored as `min h(w)` (relabelling) rather
    /// than `argmin h(w)`. Only orders that are bijections on all of `u64` may
    /// relabel; stored random keys are defined on the live vertices only.
    pub fn relabels(&self) -> bool {
        matches!(
            self,
            VertexOrder::Affine(_) | VertexOrder::KeyedPermutation(_)
        )
    }

    /// The map applied to vertices that drop out of the round (the `coalesce`
    /// fallback). Identity for non-relabelling orders.
    #[inline]
    pub fn relabel(&self, v: VertexId) -> VertexId {
        match self {
            VertexOrder::Affine(key) => key.apply(v),
            VertexOrder::KeyedPermutation(p) => p.permute(v),
            VertexOrder::MinId | VertexOrder::RandomKeys(_) => v,
        }
    }

    /// The affine map this order applies, if it has one in closed form.
    pub fn affine_key(&self) -> Option<AffineKey> {
        match self {
            VertexOrder::MinId => Some(AffineKey::IDENTITY),
            VertexOrder::Affine(k) => Some(*k),
            _ => None,
        }
    }
}
