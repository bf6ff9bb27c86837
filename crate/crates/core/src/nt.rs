//! Primality testing and integer factorization.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Trial division bound.
pub const TRIAL_LIMIT: u32 = 1_000_000;

/// Default Pollard–Brent iteration budget per composite cofactor.
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 18;

/// Miller–Rabin bases used for integers beyond 64 bits.
const BIG_BASES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; limit + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= limit {
            if sieve[i] {
                (i * i..=limit).step_by(i).for_each(|j| sieve[j] = false);
            }
            i += 1;
        }
        (0..=limit).filter(|&i| sieve[i]).map(|i| i as u32).collect()
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic for every `u64` (the first twelve prime bases suffice).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Exact below 2^64; Miller–Rabin with twenty fixed prime bases above.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &BIG_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().expect("n > 1");
    let d = &nm1 >> s;
    'bases: for &a in &BIG_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization, possibly partial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    /// Prime factors with multiplicity, ascending.
    pub primes: Vec<(BigInt, u32)>,
    /// Composite cofactors the budget could not split, ascending.
    pub unfactored: Vec<BigInt>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }
}

/// Factors `|n|` (`n != 0`) by trial division to [`TRIAL_LIMIT`], then
/// perfect-power detection and Pollard–Brent with `budget` iterations per
/// attempt. Cofactors that resist are reported as unfactored, never guessed.
pub fn factor(n: &BigInt, budget: u64) -> Factorization {
    assert!(!n.is_zero(), "factor of zero");
    let mut rest = n.abs();
    let mut found: Vec<BigInt> = Vec::new();
    for &p in small_primes() {
        let p = BigInt::from(p);
        if &p * &p > rest {
            break;
        }
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            found.push(p.clone());
            rest = q;
        }
    }
    let mut unfactored = Vec::new();
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_probable_prime(&m) {
                found.push(m);
                continue;
            }
            if let Some((root, k)) = perfect_power(&m) {
                stack.extend(std::iter::repeat_n(root, k as usize));
                continue;
            }
            match pollard_brent(&m, budget) {
                Some(d) => {
                    stack.push(&m / &d);
                    stack.push(d);
                }
                None => unfactored.push(m),
            }
        }
    }
    found.sort();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    for p in found {
        match primes.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => primes.push((p, 1)),
        }
    }
    unfactored.sort();
    Factorization { primes, unfactored }
}

/// `m = root^k` with `k >= 2` maximal, if any.
fn perfect_power(m: &BigInt) -> Option<(BigInt, u32)> {
    let bits = m.bits() as u32;
    for k in (2..=bits).rev() {
        let r = m.nth_root(k);
        if r > BigInt::one() && &num_traits::pow(r.clone(), k as usize) == m {
            return Some((r, k));
        }
    }
    None
}

/// A nontrivial divisor of the odd composite `m`, or `None` on budget
/// exhaustion.
fn pollard_brent(m: &BigInt, budget: u64) -> Option<BigInt> {
    if m.is_even() {
        return Some(BigInt::from(2));
    }
    for c in 1u32..=8 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % m;
        let (mut y, mut r, mut q) = (BigInt::from(2), 1u64, BigInt::one());
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut spent = 0u64;
        const BLOCK: u64 = 64;
        while g.is_one() && spent < budget {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BLOCK.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % m;
                }
                g = q.gcd(m);
                k += BLOCK;
            }
            spent += r;
            r *= 2;
        }
        if g == *m {
            // Backtrack one step at a time from the saved point.
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(m);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *m {
            return Some(g);
        }
    }
    None
}
