//! Integer and prime-field linear algebra: Hermite and Smith normal forms,
//! Gaussian elimination modulo a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::Fq;

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Returns the nonzero rows in echelon order; pivots are positive and every
/// entry above a pivot is reduced into `0..pivot`.
pub fn hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c at or below row r
            let piv = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()));
            let Some(piv) = piv else { break };
            rows.swap(r, piv);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                sub_mul(&mut tail[0], &head[r], &q);
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            if !q.is_zero() {
                let (head, tail) = rows.split_at_mut(r);
                sub_mul(&mut head[i], &tail[0], &q);
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    rows
}

fn sub_mul(target: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t -= s * q;
        }
    }
}

/// Pivot column of an HNF row.
pub fn pivot(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Membership of `v` in the lattice with HNF basis `basis`.
pub fn hnf_contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut v = v.to_vec();
    for row in basis {
        let c = pivot(row).expect("HNF rows are nonzero");
        if v[..c].iter().any(|x| !x.is_zero()) {
            return false;
        }
        let (q, rem) = v[c].div_rem(&row[c]);
        if !rem.is_zero() {
            return false;
        }
        if !q.is_zero() {
            sub_mul(&mut v, row, &q);
        }
    }
    v.iter().all(Zero::is_zero)
}

/// Invariant factors `d₁ | d₂ | …` (all nonzero) of an integer matrix, plus
/// the number of zero diagonal slots up to `ncols` (the free rank of the cokernel).
pub fn smith_invariants(mat: &[Vec<BigInt>], ncols: usize) -> (Vec<BigInt>, usize) {
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // pick the smallest nonzero entry in the remaining block
        let best = (t..nrows)
            .flat_map(|i| (t..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| !m[i][j].is_zero())
            .min_by(|&(a, b), &(c, d)| m[a][b].abs().cmp(&m[c][d].abs()));
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in t + 1..nrows {
            let q = m[i][t].div_floor(&m[t][t]);
            if !q.is_zero() {
                let (head, tail) = m.split_at_mut(i);
                sub_mul(&mut tail[0], &head[t], &q);
            }
            if !m[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..ncols {
            let q = m[t][j].div_floor(&m[t][t]);
            if !q.is_zero() {
                for row in m.iter_mut() {
                    let s = &row[t] * &q;
                    row[j] -= s;
                }
            }
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold any non-multiple into row t and retry
        let bad = (t + 1..nrows)
            .flat_map(|i| (t + 1..ncols).map(move |j| (i, j)))
            .find(|&(i, j)| !m[i][j].is_multiple_of(&m[t][t]));
        if let Some((i, _)) = bad {
            let (head, tail) = m.split_at_mut(i);
            for (a, b) in head[t].iter_mut().zip(&tail[0]) {
                *a += b;
            }
            continue;
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    let free = ncols - diag.len();
    (diag, free)
}

/// Row echelon form modulo `q`; returns the rank. Rows are modified in place.
pub fn row_reduce_mod(rows: &mut [Vec<u64>], f: Fq) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][c]).unwrap();
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let k = rows[i][c];
                let (a, b) = if i < r {
                    let (h, t) = rows.split_at_mut(r);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = rows.split_at_mut(i);
                    (&mut t[0], &h[r])
                };
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x = f.sub(*x, f.mul(k, *y));
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

pub fn rank_mod(rows: &[Vec<u64>], f: Fq) -> usize {
    let mut m = rows.to_vec();
    row_reduce_mod(&mut m, f)
}

/// Basis of `{x : M x = 0}` over `F_q`, for `M` given by rows.
pub fn nullspace_mod(rows: &[Vec<u64>], ncols: usize, f: Fq) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let rank = row_reduce_mod(&mut m, f);
    let pivots: Vec<usize> = m[..rank]
        .iter()
        .map(|row| row.iter().position(|&x| x != 0).unwrap())
        .collect();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![0; ncols];
        x[free] = 1;
        for (row, &pc) in m[..rank].iter().zip(&pivots) {
            x[pc] = f.neg(row[free]);
        }
        out.push(x);
    }
    out
}

/// Left kernel modulo `p` of an integer matrix: the `c` with `c · M ≡ 0`.
pub fn left_kernel_mod_p(rows: &[Vec<BigInt>], f: Fq) -> Vec<Vec<u64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let transposed: Vec<Vec<u64>> = (0..ncols)
        .map(|j| (0..nrows).map(|i| f.from_bigint(&rows[i][j])).collect())
        .collect();
    nullspace_mod(&transposed, nrows, f)
}

/// Product of the pivots of a full-rank square HNF basis.
pub fn hnf_index(basis: &[Vec<BigInt>], dim: usize) -> Option<BigInt> {
    if basis.len() != dim {
        return None;
    }
    Some(basis.iter().fold(BigInt::one(), |acc, row| acc * &row[pivot(row).unwrap()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_of_small_lattice() {
        let h = hnf(bi(&[&[2, 4], &[3, 5]]));
        assert_eq!(h, bi(&[&[1, 1], &[0, 2]]));
        assert!(hnf_contains(&h, &bi(&[&[5, 9]])[0]));
        assert!(!hnf_contains(&h, &bi(&[&[0, 1]])[0]));
        assert_eq!(hnf_index(&h, 2), Some(BigInt::from(2)));
    }

    #[test]
    fn smith_examples() {
        let (d, free) = smith_invariants(&bi(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), 3);
        assert_eq!(d, bi(&[&[2, 6, 12]])[0]);
        assert_eq!(free, 0);
        let (d, free) = smith_invariants(&bi(&[&[5]]), 1);
        assert_eq!((d, free), (vec![BigInt::from(5)], 0));
        let (d, free) = smith_invariants(&[], 3);
        assert!(d.is_empty());
        assert_eq!(free, 3);
    }

    #[test]
    fn nullspace_mod_small() {
        let f = Fq::new(7).unwrap();
        let ns = nullspace_mod(&[vec![1, 2, 3], vec![2, 4, 6]], 3, f);
        assert_eq!(ns.len(), 2);
        for x in ns {
            assert_eq!((x[0] + 2 * x[1] + 3 * x[2]) % 7, 0);
        }
        assert_eq!(rank_mod(&[vec![1, 2], vec![3, 4]], f), 2);
    }
}
