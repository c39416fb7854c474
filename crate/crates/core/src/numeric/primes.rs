//! Miller–Rabin primality.
//!
//! Below 2^64 the fixed witness set {2, 3, …, 37} makes the test
//! deterministic. Above that, 64 witnesses are drawn from a ChaCha stream
//! with a fixed seed, which bounds the error probability by 4^-64 = 2^-128
//! for every composite while keeping results reproducible.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rug::Integer;

const SMALL_PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const RANDOM_ROUNDS: usize = 64;
const WITNESS_SEED: u64 = 0x6e6f_7274_6863_6f74;

fn strong_probable_prime(n: &Integer, d: &Integer, s: u32, a: &Integer) -> bool {
    let n1 = Integer::from(n - 1);
    let mut x = a.clone().pow_mod(d, n).expect("modulus is positive");
    if x == 1 || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = x.square() % n;
        if x == n1 {
            return true;
        }
        if x == 1 {
            return false;
        }
    }
    false
}

pub fn is_prime(n: &Integer) -> bool {
    if *n < 2 {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        if *n == p {
            return true;
        }
        if n.is_divisible_u(p) {
            return false;
        }
    }
    let n1 = Integer::from(n - 1);
    let s = n1.find_one(0).expect("n - 1 is nonzero");
    let d = Integer::from(&n1 >> s);
    if n.significant_bits() <= 64 {
        return SMALL_PRIMES.iter().all(|&a| strong_probable_prime(n, &d, s, &Integer::from(a)));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(WITNESS_SEED);
    let bits = n.significant_bits();
    let upper = Integer::from(n - 3);
    (0..RANDOM_ROUNDS).all(|_| {
        // uniform-ish witness in [2, n-2]
        let mut limbs = Integer::new();
        for _ in 0..bits.div_ceil(64) {
            limbs <<= 64;
            limbs += rng.gen::<u64>();
        }
        let a = limbs % &upper + 2u32;
        strong_probable_prime(n, &d, s, &a)
    })
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: &Integer) -> Integer {
    if *n < 2 {
        return Integer::from(2);
    }
    let mut c = Integer::from(n + 1);
    if c.is_even() && c != 2 {
        c += 1;
    }
    while !is_prime(&c) {
        c += 2;
    }
    c
}

/// Factorisation by trial division up to `limit`; `None` when a cofactor
/// above `limit^2` is not prime.
pub fn factor_small(n: &Integer, limit: u64) -> Option<Vec<(Integer, u32)>> {
    let mut m = Integer::from(n.abs_ref());
    let mut out = Vec::new();
    if m <= 1 {
        return Some(out);
    }
    let mut p = 2u64;
    while p <= limit && p * p <= m {
        if m.is_divisible_u(p as u32) {
            let mut e = 0;
            while m.is_divisible_u(p as u32) {
                m /= p;
                e += 1;
            }
            out.push((Integer::from(p), e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if is_prime(&m) {
            out.push((m, 1));
        } else {
            return None;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_values_match_trial_division() {
        for n in 0..5000u64 {
            assert_eq!(is_prime(&Integer::from(n)), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn spec_examples() {
        assert!(is_prime(&Integer::from(2)));
        assert!(!is_prime(&Integer::from(561)));
        assert!(is_prime(&Integer::from(1_000_003)));
        assert!(trial_division(1_000_003));
    }

    #[test]
    fn strong_pseudoprimes_are_rejected() {
        // strong pseudoprimes to several small bases
        for n in [2047u64, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383, 341550071728321] {
            assert!(!is_prime(&Integer::from(n)), "{n}");
        }
        assert!(is_prime(&Integer::from(18446744073709551557u64)));
    }

    #[test]
    fn large_primes_and_composites() {
        let m127 = (Integer::from(1) << 127) - 1u32;
        assert!(is_prime(&m127));
        let c = Integer::from(&m127 * &m127);
        assert!(!is_prime(&c));
        let p = next_prime(&(Integer::from(1) << 200));
        assert!(p.is_probably_prime(40) != rug::integer::IsPrime::No);
    }

    #[test]
    fn next_prime_steps() {
        assert_eq!(next_prime(&Integer::from(16)), 17);
        assert_eq!(next_prime(&Integer::from(17)), 19);
        assert_eq!(next_prime(&Integer::from(0)), 2);
        assert_eq!(next_prime(&Integer::from(2)), 3);
    }

    #[test]
    fn factor_small_works() {
        let f = factor_small(&Integer::from(360), 1000).unwrap();
        assert_eq!(f, vec![(Integer::from(2), 3), (Integer::from(3), 2), (Integer::from(5), 1)]);
        let f = factor_small(&Integer::from(2u64 * 1_000_003), 100).unwrap();
        assert_eq!(f, vec![(Integer::from(2), 1), (Integer::from(1_000_003), 1)]);
    }
}
