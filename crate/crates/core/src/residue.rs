//! Residue helpers shared by every module.
//!
//! All sign conventions go through [`neg_mod`] and [`reduce`]: `[x]_N` is the
//! representative of `x` in `[0, N)`, so `[-a]_N` is `neg_mod(a, N)`.

/// Representative of `x` in `[0, n)`.
pub fn reduce(x: i64, n: u32) -> u32 {
    x.rem_euclid(n as i64) as u32
}

/// `[-a]_N` for `a` already in `[0, N)`.
pub fn neg_mod(a: u32, n: u32) -> u32 {
    if a == 0 {
        0
    } else {
        n - a
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of `n` together with every entry of `xs`.
pub fn gcd_with(n: u32, xs: impl IntoIterator<Item = u32>) -> u32 {
    xs.into_iter().fold(n as u64, |g, x| gcd(g, x as u64)) as u32
}

/// Units of `Z/n`, ascending.
pub fn units(n: u32) -> Vec<u32> {
    (1..n).filter(|&u| gcd(u as u64, n as u64) == 1).collect()
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime `p` (Fermat); `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Determinant of a square matrix over `F_p` by Gaussian elimination.
#[allow(clippy::needless_range_loop)]
pub fn det_mod(matrix: &[Vec<u64>], p: u64) -> u64 {
    let n = matrix.len();
    let mut m: Vec<Vec<u64>> = matrix.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut det = 1u64;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if pivot != col {
            m.swap(pivot, col);
            det = (p - det) % p;
        }
        det = det * m[col][col] % p;
        let inv = inv_mod(m[col][col], p);
        for r in col + 1..n {
            let f = m[r][col] * inv % p;
            if f == 0 {
                continue;
            }
            for c in col..n {
                m[r][c] = (m[r][c] + p - f * m[col][c] % p) % p;
            }
        }
    }
    det
}
