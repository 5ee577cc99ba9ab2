use crate::error::{Error, Result};

/// Frobenius trace `a_p = p + 1 - #C(F_p)` of the genus-1 curve
/// `w^2 = prod_j (x - z_j)`, counted by brute force. The degree-4 model with
/// leading coefficient 1 has two rational points at infinity.
pub fn elliptic_trace_oracle(p: u64, z: &[u64; 4]) -> Result<i64> {
    if p < 3 || !crate::residue::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let z: Vec<u64> = z.iter().map(|&x| x % p).collect();
    if (0..4).any(|i| z[..i].contains(&z[i])) {
        return Err(Error::RepeatedPoint);
    }
    // roots[v] = number of w with w^2 = v
    let mut roots = vec![0i64; p as usize];
    for w in 0..p {
        roots[(w * w % p) as usize] += 1;
    }
    let affine: i64 = (0..p)
        .map(|x| {
            let f = z.iter().fold(1u64, |acc, &zj| acc * ((x + p - zj) % p) % p);
            roots[f as usize]
        })
        .sum();
    Ok(p as i64 + 1 - (affine + 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hasse_bound() {
        for p in [5u64, 7, 11, 13] {
            for a in 0..p {
                let z = [a, (a + 1) % p, (a + 2) % p, (a + 4) % p];
                let t = elliptic_trace_oracle(p, &z).unwrap();
                assert!(t * t <= 4 * p as i64, "p={p} z={z:?} a_p={t}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(elliptic_trace_oracle(9, &[0, 1, 2, 3]), Err(Error::NotPrime(9)));
        assert_eq!(elliptic_trace_oracle(5, &[0, 1, 1, 3]), Err(Error::RepeatedPoint));
    }
}
