//! Diagonal of the Smith normal form of an integer matrix.

/// Nonzero invariant factors `e_1 | e_2 | ...` of `matrix` (rows of equal length).
#[allow(clippy::needless_range_loop)]
pub fn invariant_factors(matrix: &[Vec<i64>]) -> Vec<i64> {
    let mut m: Vec<Vec<i128>> = matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let pivot = m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let f = m[i][t] / pivot;
                if f != 0 {
                    for j in t..cols {
                        m[i][j] -= f * m[t][j];
                    }
                }
                dirty |= m[i][t] != 0;
            }
            for j in t + 1..cols {
                let f = m[t][j] / pivot;
                if f != 0 {
                    for i in t..rows {
                        m[i][j] -= f * m[i][t];
                    }
                }
                dirty |= m[t][j] != 0;
            }
            if !dirty {
                // pivot must divide the rest of the block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % pivot != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // a smaller remainder appeared: move it to the pivot position
            let mut best = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].unsigned_abs() as i64);
        t += 1;
    }
    diag
}
