//! Elementary arithmetic on machine integers: modular powers, primality,
//! quadratic residue symbols, modular square roots and small sieves.

use num_integer::Roots;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn reduce(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

#[inline]
pub fn reduce_i128(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol `(a / p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i8 {
    debug_assert!(p > 2);
    let a = reduce(a, p);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(a / n)` for `n > 0`.
pub fn kronecker(a: i64, n: u64) -> i8 {
    assert!(n > 0, "kronecker symbol needs a positive modulus");
    let mut n = n;
    let mut result: i8 = 1;
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        n >>= twos;
    }
    // Jacobi symbol (a / n) for odd n.
    let mut a = reduce(a, n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli-Shanks), or `None`
/// when `a` is a non-residue. The smaller of the two roots is returned.
pub fn sqrt_mod(a: i64, p: u64) -> Option<u64> {
    let a = reduce(a, p);
    if p == 2 {
        return Some(a);
    }
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while pow_mod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = mul_mod(tt, tt, p);
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    };
    Some(root.min(p - root))
}

/// Modular inverse for coprime `a`, `m`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn is_square_u128(n: u128) -> bool {
    let r = n.sqrt();
    r * r == n
}

pub fn is_square_i128(n: i128) -> bool {
    n >= 0 && is_square_u128(n as u128)
}

/// Exponent of `p` in `n` (`n != 0`).
pub fn valuation(mut n: u128, p: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let p = p as u128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Primality table for `0..=limit`.
pub fn prime_table(limit: usize) -> Vec<bool> {
    let mut table = vec![true; limit + 1];
    table[0] = false;
    if limit >= 1 {
        table[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if table[i] {
            let mut j = i * i;
            while j <= limit {
                table[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    table
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    prime_table(limit as usize)
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i as u64))
        .collect()
}

/// Squarefreeness table for `0..=limit` (`table[0]` is false).
pub fn squarefree_table(limit: usize) -> Vec<bool> {
    let mut table = vec![true; limit + 1];
    table[0] = false;
    let mut d = 2usize;
    while d * d <= limit {
        let sq = d * d;
        let mut j = sq;
        while j <= limit {
            table[j] = false;
            j += sq;
        }
        d += 1;
    }
    table
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}
