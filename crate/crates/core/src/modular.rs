//! Small helpers for arithmetic in `Z_p`.

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `x mod p` for any signed `x`, as a residue in `[0, p)`.
#[inline]
pub fn reduce(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Inverse of `x` modulo the prime `p` by Fermat's little theorem.
pub fn inv_mod(x: u32, p: u32) -> Option<u32> {
    if x % p == 0 {
        return None;
    }
    let (mut base, mut e, mut acc) = ((x % p) as u64, p as u64 - 2, 1u64);
    let m = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    Some(acc as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn inverses() {
        for p in [5, 7, 11, 13] {
            for x in 1..p {
                assert_eq!(x * inv_mod(x, p).unwrap() % p, 1);
            }
            assert_eq!(inv_mod(0, p), None);
        }
        assert_eq!(reduce(-1, 5), 4);
    }
}
