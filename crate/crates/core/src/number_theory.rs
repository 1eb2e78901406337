//! Small integer helpers: sieves, factorization, square-free enumeration.

/// Smallest prime factor of every integer in `0..=n` (0 and 1 map to 0).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// All primes `<= n`.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    smallest_prime_factors(n)
        .iter()
        .enumerate()
        .filter(|&(i, &p)| i >= 2 && p as usize == i)
        .map(|(i, _)| i as u64)
        .collect()
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let mut bound = 16usize;
    loop {
        let ps = primes_up_to(bound);
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
        bound *= 2;
    }
}

/// Factorization of `m` as `(prime, exponent)` pairs using a precomputed sieve.
pub fn factorize(mut m: usize, spf: &[u32]) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    while m > 1 {
        let p = spf[m] as usize;
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        out.push((p as u64, e));
    }
    out
}

pub fn is_square_free(m: u64) -> bool {
    let mut d = 2u64;
    let mut m = m;
    while d * d <= m {
        if m.is_multiple_of(d * d) {
            return false;
        }
        if m.is_multiple_of(d) {
            m /= d;
        }
        d += 1;
    }
    true
}

/// The first `count` square-free integers greater than 1.
pub fn square_free_from_two(count: usize) -> Vec<u64> {
    (2u64..).filter(|&m| is_square_free(m)).take(count).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_and_factor() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
        let spf = smallest_prime_factors(100);
        assert_eq!(factorize(12, &spf), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(97, &spf), vec![(97, 1)]);
        assert!(factorize(1, &spf).is_empty());
    }

    #[test]
    fn square_free() {
        assert_eq!(square_free_from_two(8), vec![2, 3, 5, 6, 7, 10, 11, 13]);
        assert!(!is_square_free(18));
    }
}
