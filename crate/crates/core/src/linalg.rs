//! Dense Gaussian elimination over F_p.

use crate::field::PrimeField;

pub type Matrix = Vec<Vec<u32>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn row_reduce(f: PrimeField, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = f.inv(m[r][c]).expect("nonzero pivot");
        for v in m[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c];
                for j in 0..cols {
                    let sub = f.mul(factor, m[r][j]);
                    m[i][j] = f.sub(m[i][j], sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: PrimeField, m: &Matrix) -> usize {
    let mut m = m.clone();
    row_reduce(f, &mut m).len()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(f: PrimeField, m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let pivots = row_reduce(f, &mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `Σ_i c_i rows[i] = target` if possible.
pub fn solve_combination(f: PrimeField, rows: &[Vec<u32>], target: &[u32]) -> Option<Vec<u32>> {
    let k = rows.len();
    let n = target.len();
    // columns are the given rows; one equation per coordinate
    let mut m: Matrix = (0..n)
        .map(|j| {
            let mut r: Vec<u32> = rows.iter().map(|row| row.get(j).copied().unwrap_or(0)).collect();
            r.push(target[j]);
            r
        })
        .collect();
    let pivots = row_reduce(f, &mut m);
    if pivots.contains(&k) {
        return None;
    }
    let mut sol = vec![0; k];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = m[r][k];
    }
    Some(sol)
}

pub fn mat_vec_t(f: PrimeField, v: &[u32], m: &Matrix) -> Vec<u32> {
    // vᵀ M
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| {
            v.iter()
                .zip(m)
                .fold(0, |acc, (&a, row)| f.add(acc, f.mul(a, row[j])))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(rank(f5, &vec![vec![0, 3], vec![3, 0]]), 2);
        assert_eq!(rank(f5, &vec![vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(rank(f5, &vec![vec![1, 2], vec![2, 4]]), 1);
    }

    #[test]
    fn inverse_roundtrip() {
        let f7 = PrimeField::new(7).unwrap();
        let m = vec![vec![1, 2, 0], vec![0, 1, 3], vec![4, 0, 1]];
        let inv = inverse(f7, &m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v = (0..3).fold(0, |acc, k| f7.add(acc, f7.mul(m[i][k], inv[k][j])));
                assert_eq!(v, u32::from(i == j));
            }
        }
        assert!(inverse(f7, &vec![vec![1, 2], vec![2, 4]]).is_none());
    }

    #[test]
    fn combinations() {
        let f5 = PrimeField::new(5).unwrap();
        let rows = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let c = solve_combination(f5, &rows, &[2, 3, 1]).unwrap();
        assert_eq!(c, vec![2, 1]);
        assert!(solve_combination(f5, &rows, &[1, 0, 0]).is_none());
    }
}
