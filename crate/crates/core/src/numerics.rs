//! Exact integer and rational arithmetic.
//!
//! Everything here is pure 64-bit integer math; nothing rounds. The rest of
//! the crate leans on these primitives both to drive the simulator (addend
//! schedules) and to post-process measurements (fraction recovery and gcd
//! extraction).

use std::fmt;

use crate::error::{Error, Result};
use crate::MAX_MODULUS;

/// Binary gcd: shifts, subtraction and parity tests only.
///
/// `stein_gcd(0, 0)` is defined as 0 so fraction reduction stays total.
pub fn stein_gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let common_twos = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << common_twos;
        }
    }
}

/// `⌈log2 n⌉` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    debug_assert!(n >= 1);
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// An exact non-negative fraction. `den` is always positive; a fraction is
/// *reduced* when `gcd(num, den) = 1` (constructors do not reduce on their
/// own, see [`reduce_fraction`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain(
                "rational denominator must be positive".into(),
            ));
        }
        Ok(Rational { num, den })
    }

    pub fn reduce(self) -> Rational {
        if self.num == 0 {
            return Rational::ZERO;
        }
        let g = stein_gcd(self.num, self.den);
        Rational {
            num: self.num / g,
            den: self.den / g,
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.num == 0 && self.den == 1 || stein_gcd(self.num, self.den) == 1
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Reduce `p/q` to lowest terms; `0/q` becomes `0/1`.
pub fn reduce_fraction(p: u64, q: u64) -> Result<Rational> {
    Ok(Rational::new(p, q)?.reduce())
}

/// Least common multiple with overflow detection.
pub fn lcm(x: u64, r: u64) -> Result<u64> {
    if x == 0 || r == 0 {
        return Err(Error::Domain("lcm arguments must be positive".into()));
    }
    let g = stein_gcd(x, r);
    (x / g)
        .checked_mul(r)
        .ok_or_else(|| Error::Range(format!("lcm({x}, {r}) overflows 64 bits")))
}

/// Addend schedule `[(2^j x) mod r for j = 0..t-1]`, computed by iterated
/// modular doubling so each entry costs one modular addition.
pub fn precompute_multiples(x: u64, r: u64, t: u32) -> Result<Vec<u64>> {
    if r < 2 {
        return Err(Error::Domain("modulus must be at least 2".into()));
    }
    if t == 0 {
        return Err(Error::Domain("schedule length must be positive".into()));
    }
    let mut out = Vec::with_capacity(t as usize);
    let mut v = x % r;
    for _ in 0..t {
        out.push(v);
        v = (v + v) % r;
    }
    Ok(out)
}

/// All continued-fraction convergents of `b` (with `0 <= b < 1`) whose
/// denominator does not exceed `den_bound`, in order of increasing
/// denominator. The Shor-style alternative to direct rounding recovery.
pub fn cf_convergents(b: Rational, den_bound: u64) -> Result<Vec<Rational>> {
    if b.num >= b.den {
        return Err(Error::Domain(format!(
            "expected a fraction in [0, 1), got {b}"
        )));
    }
    if den_bound == 0 {
        return Err(Error::Domain("denominator bound must be positive".into()));
    }
    let mut convergents = Vec::new();
    // Convergent recurrence h_i = a_i h_{i-1} + h_{i-2}, same for k, seeded
    // with h_{-2}/k_{-2} = 0/1 and h_{-1}/k_{-1} = 1/0.
    let (mut h_prev2, mut h_prev) = (0u64, 1u64);
    let (mut k_prev2, mut k_prev) = (1u64, 0u64);
    let (mut n, mut d) = (b.num, b.den);
    loop {
        let a = n / d;
        let rem = n % d;
        let h = a * h_prev + h_prev2;
        let k = a * k_prev + k_prev2;
        if k > den_bound {
            break;
        }
        convergents.push(Rational { num: h, den: k });
        if rem == 0 {
            break;
        }
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        n = d;
        d = rem;
    }
    Ok(convergents)
}

/// The two inputs together with every derived quantity the algorithm needs.
///
/// `order` is the least positive `N` with `N·x ≡ 0 (mod r)`; it satisfies
/// `N·x = r·cofactor = lcm` and `gcd(x, r) = r / N`. The simulator itself
/// only ever adds `x mod r` (see [`addend`](Self::addend)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemInstance {
    /// First input, as given.
    pub x: u64,
    /// Second input; the modulus of the addition unitary.
    pub r: u64,
    /// Work-register bit width `⌈log2 r⌉` used by the circuit cost model.
    pub work_bits: u32,
    /// Orbit length `N = r / gcd(x, r)`.
    pub order: u64,
    /// Least common multiple of `x` and `r`.
    pub lcm: u64,
    /// `lcm / r`.
    pub cofactor: u64,
}

impl ProblemInstance {
    pub fn new(x: u64, r: u64) -> Result<Self> {
        if x == 0 {
            return Err(Error::Domain("x must be positive".into()));
        }
        if r < 2 {
            return Err(Error::Domain("r must be at least 2".into()));
        }
        if r >= MAX_MODULUS || x >= MAX_MODULUS {
            return Err(Error::Range(format!(
                "inputs must be below {MAX_MODULUS} (got x={x}, r={r})"
            )));
        }
        let g = stein_gcd(x, r);
        let lcm = lcm(x, r)?;
        Ok(ProblemInstance {
            x,
            r,
            work_bits: ceil_log2(r),
            order: r / g,
            lcm,
            cofactor: lcm / r,
        })
    }

    /// The value actually added per controlled application: `x mod r`.
    pub fn addend(&self) -> u64 {
        self.x % self.r
    }

    /// True when `x mod r = 0`: the orbit is `{0}`, `order = 1`, and the
    /// answer is `r` with no quantum procedure at all.
    pub fn is_trivial(&self) -> bool {
        self.addend() == 0
    }

    /// `gcd(x, r) = r / order`.
    pub fn gcd(&self) -> u64 {
        self.r / self.order
    }
}
