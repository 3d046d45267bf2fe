use crate::gf::{Fe, Field};
use crate::linalg::Subspace;

/// Increasing pivot-column tuples of length d in 0..n.
pub fn pivot_patterns(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            if n - c < d - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, n, d, cur, out);
            cur.pop();
        }
    }
    rec(0, n, d, &mut cur, &mut out);
    out
}

/// Every RREF basis with the given pivot columns.
pub fn subspaces_with_pivots(field: &Field, n: usize, pivots: &[usize]) -> impl Iterator<Item = Subspace> {
    let field = field.clone();
    let pivots = pivots.to_vec();
    let free: Vec<(usize, usize)> = pivots
        .iter()
        .enumerate()
        .flat_map(|(i, &pc)| (pc + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
        .collect();
    let q = field.q() as u64;
    let total = q.pow(free.len() as u32);
    (0..total).map(move |mut code| {
        let mut rows = vec![vec![Fe(0); n]; pivots.len()];
        for (i, &pc) in pivots.iter().enumerate() {
            rows[i][pc] = Fe(1);
        }
        for &(i, c) in &free {
            rows[i][c] = Fe((code % q) as u32);
            code /= q;
        }
        Subspace::from_rref_unchecked(&field, n, rows, pivots.clone())
    })
}

/// All d-dimensional subspaces of F_q^n, pattern by pattern.
pub fn grassmannian_iter(field: &Field, n: usize, d: usize) -> impl Iterator<Item = Subspace> {
    let field = field.clone();
    pivot_patterns(n, d)
        .into_iter()
        .flat_map(move |p| subspaces_with_pivots(&field, n, &p).collect::<Vec<_>>())
}

/// Gaussian binomial [n choose d]_q.
pub fn gaussian_binomial(n: u32, d: u32, q: u64) -> u64 {
    if d > n {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..d {
        num *= (q as u128).pow(n - i) - 1;
        den *= (q as u128).pow(i + 1) - 1;
    }
    (num / den) as u64
}

/// Projective points of F_q^n, as normalized representatives (first nonzero entry 1).
pub fn projective_points(field: &Field, n: usize) -> impl Iterator<Item = Vec<Fe>> + '_ {
    (0..n).flat_map(move |lead| {
        subspaces_with_pivots(field, n, &[lead]).map(|s| s.basis()[0].clone())
    })
}
