//! Exact rational scalars and small dense linear algebra.
//!
//! Everything here works over arbitrary-precision rationals ([`Rat`]) or
//! integers ([`Int`]). Matrices are row-major `Vec<Vec<_>>`; the dimensions in
//! this crate are tiny (ambient dimension ≤ 5, a dozen facets), so simplicity
//! beats cleverness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// `p/q` as a rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(Int::from(p))
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat_int(x)).collect()
}

/// Exact conversion; every finite `f64` is a rational with a power-of-two
/// denominator. Returns `None` for NaN or infinities.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn vec_to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(rat_to_f64).collect()
}

pub fn vec_from_f64(v: &[f64]) -> Option<Vec<Rat>> {
    v.iter().map(|&x| rat_from_f64(x)).collect()
}

/// Parses "p/q", an integer, or a plain decimal such as "0.25" (all exact).
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: Int = num.trim().parse().ok()?;
        let d: Int = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.contains(['+', '-']) {
            return None;
        }
        let negative = whole.trim_start().starts_with('-');
        let w: Int = if whole == "-" || whole.is_empty() {
            Int::zero()
        } else {
            whole.parse().ok()?
        };
        let f: Int = frac.parse().ok()?;
        let scale = Int::from(10u32).pow(frac.len() as u32);
        let mag = w.abs() * &scale + f;
        let signed = if negative { -mag } else { mag };
        return Some(Rat::new(signed, scale));
    }
    let n: Int = s.parse().ok()?;
    Some(Rat::from_integer(n))
}

/// Renders a rational as "p/q", or just "p" when the denominator is 1.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨v, x⟩` for an integer vector against a rational point.
pub fn dot_int_rat(v: &[Int], x: &[Rat]) -> Rat {
    v.iter()
        .zip(x)
        .map(|(a, b)| Rat::from_integer(a.clone()) * b)
        .sum()
}

pub fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn gcd_vec(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

/// Divides out the gcd. Returns `None` for the zero vector.
pub fn primitive(v: &[Int]) -> Option<Vec<Int>> {
    let g = gcd_vec(v);
    if g.is_zero() {
        return None;
    }
    Some(v.iter().map(|x| x / &g).collect())
}

pub fn is_primitive(v: &[Int]) -> bool {
    gcd_vec(v).is_one()
}

/// Clears denominators and divides by the gcd; sign fixed so the first
/// nonzero entry is positive. Returns `None` for the zero vector.
pub fn primitive_from_rat(v: &[Rat]) -> Option<Vec<Int>> {
    let lcm = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<Int> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut p = primitive(&ints)?;
    if let Some(first) = p.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut p {
                *x = -x.clone();
            }
        }
    }
    Some(p)
}

/// Rank of the matrix with the given rows, by Gaussian elimination.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let pv = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = &m[i][c] / &pv;
                for j in c..ncols {
                    let sub = &factor * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

pub fn rank_int(rows: &[Vec<Int>]) -> usize {
    let rat_rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    rank(&rat_rows)
}

/// Determinant of a square rational matrix.
pub fn det(rows: &[Vec<Rat>]) -> Rat {
    let n = rows.len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut result = Rat::one();
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if pivot != c {
            m.swap(c, pivot);
            result = -result;
        }
        let pv = m[c][c].clone();
        result *= &pv;
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let factor = &m[i][c] / &pv;
                for j in c..n {
                    let sub = &factor * &m[c][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
    }
    result
}

pub fn det_int(rows: &[Vec<Int>]) -> Int {
    let rat_rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let d = det(&rat_rows);
    debug_assert!(d.denom().is_one());
    d.numer().clone()
}

/// Solves the (possibly overdetermined) system `rows · x = rhs` exactly.
///
/// Assumes the coefficient matrix has full column rank; returns `None` when
/// the system is inconsistent.
pub fn solve(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let Some(p) = (pivot_row..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let pv = m[pivot_row][c].clone();
        for i in 0..nrows {
            if i != pivot_row && !m[i][c].is_zero() {
                let factor = &m[i][c] / &pv;
                for j in c..=ncols {
                    let sub = &factor * &m[pivot_row][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivots.push((pivot_row, c));
        pivot_row += 1;
    }
    // Any leftover row with zero coefficients but nonzero rhs: inconsistent.
    for i in pivot_row..nrows {
        if !m[i][ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); ncols];
    for (r, c) in pivots {
        x[c] = &m[r][ncols] / &m[r][c];
    }
    Some(x)
}

/// Inverse of a square rational matrix; `None` if singular.
pub fn inverse(rows: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = rows.len();
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            for j in 0..n {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            row
        })
        .collect();
    for c in 0..n {
        let pivot = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, pivot);
        let pv = m[c][c].clone();
        for j in c..2 * n {
            m[c][j] = &m[c][j] / &pv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..2 * n {
                    let sub = &factor * &m[c][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Basis of the kernel `{x : rows · x = 0}`, as primitive integer vectors.
///
/// Deterministic: reduced row echelon form with left-to-right pivoting, one
/// basis vector per free column in increasing column order, each normalized
/// to a primitive integer vector whose first nonzero entry is positive.
pub fn kernel_basis(rows: &[Vec<Rat>]) -> Vec<Vec<Int>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for j in c..ncols {
            m[r][j] = &m[r][j] / &pv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..ncols {
                    let sub = &factor * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    let mut basis = Vec::new();
    for c in 0..ncols {
        if pivot_cols.contains(&c) {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[c] = Rat::one();
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[row][c].clone();
        }
        basis.push(primitive_from_rat(&v).expect("kernel vector is nonzero"));
    }
    basis
}

pub fn kernel_basis_int(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let rat_rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    kernel_basis(&rat_rows)
}

/// Diagonal of the Smith normal form of an integer matrix.
///
/// Entries are nonnegative and each divides the next; trailing zeros pad up
/// to `min(rows, cols)`.
pub fn smith_normal_diagonal(rows: &[Vec<Int>]) -> Vec<Int> {
    let mut m: Vec<Vec<Int>> = rows.to_vec();
    let nr = m.len();
    let nc = m.first().map_or(0, Vec::len);
    let k = nr.min(nc);
    let mut diag = Vec::with_capacity(k);
    let mut top = 0;
    while top < k {
        // Find the nonzero entry of smallest absolute value in the submatrix.
        let mut best: Option<(usize, usize)> = None;
        for i in top..nr {
            for j in top..nc {
                if !m[i][j].is_zero()
                    && best
                        .map(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                        .unwrap_or(true)
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else {
            break;
        };
        m.swap(top, bi);
        for row in &mut m {
            row.swap(top, bj);
        }
        // Reduce the pivot row and column; restart if a remainder shrinks the
        // pivot, since the minimal entry may have moved.
        let mut clean = true;
        for i in top + 1..nr {
            let q = div_round(&m[i][top], &m[top][top]);
            if !q.is_zero() {
                for j in top..nc {
                    let sub = &q * &m[top][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
            if !m[i][top].is_zero() {
                clean = false;
            }
        }
        for j in top + 1..nc {
            let q = div_round(&m[top][j], &m[top][top]);
            if !q.is_zero() {
                for i in top..nr {
                    let sub = &q * &m[i][top];
                    m[i][j] = &m[i][j] - sub;
                }
            }
            if !m[top][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Divisibility fix-up: the pivot must divide every remaining entry.
        let mut fixed = true;
        'outer: for i in top + 1..nr {
            for j in top + 1..nc {
                if !(&m[i][j] % &m[top][top]).is_zero() {
                    for jj in top..nc {
                        let add = m[i][jj].clone();
                        m[top][jj] += add;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        diag.push(m[top][top].abs());
        top += 1;
    }
    diag.resize(k, Int::zero());
    diag
}

fn div_round(a: &Int, b: &Int) -> Int {
    // Nearest-integer division keeps SNF pivots small.
    let (q, r) = a.div_rem(b);
    let two_r = Int::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// True when the sublattice spanned by the rows is saturated in ℤ^cols,
/// i.e. all nonzero Smith invariant factors equal 1.
pub fn is_saturated(rows: &[Vec<Int>]) -> bool {
    smith_normal_diagonal(rows)
        .iter()
        .all(|d| d.is_zero() || d.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("13/12").unwrap(), rat(13, 12));
        assert_eq!(parse_rat("-3").unwrap(), rat_int(-3));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("2.").and_then(|_| None::<Rat>), None);
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
        assert_eq!(format_rat(&rat(13, 12)), "13/12");
        assert_eq!(format_rat(&rat(-6, 3)), "-2");
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let x = 0.1f64;
        let r = rat_from_f64(x).unwrap();
        assert_eq!(rat_to_f64(&r), x);
        assert_eq!(rat_from_f64(0.5).unwrap(), rat(1, 2));
    }

    #[test]
    fn solve_overdetermined_consistent() {
        // dP1 witness: ℓ_a(p) = β_a has solution p = (1/12, -1/6, 1).
        let rows = vec![
            rat_vec(&[1, 0, 1]),
            rat_vec(&[0, -1, 1]),
            rat_vec(&[-1, -1, 1]),
            rat_vec(&[0, 1, 1]),
        ];
        let rhs = vec![rat(13, 12), rat(7, 6), rat(13, 12), rat(5, 6)];
        let p = solve(&rows, &rhs).unwrap();
        assert_eq!(p, vec![rat(1, 12), rat(-1, 6), rat_int(1)]);

        let bad_rhs = vec![rat_int(1), rat_int(2), rat_int(1), rat_int(1)];
        assert!(solve(&rows, &bad_rhs).is_none());
    }

    #[test]
    fn kernel_of_p1p1_normal_transpose() {
        // Columns are the normals of the cone over P^1 x P^1; the kernel is
        // spanned by the alternating relation.
        let rows = vec![
            rat_vec(&[1, 0, -1, 0]),
            rat_vec(&[0, 1, 0, -1]),
            rat_vec(&[1, 1, 1, 1]),
        ];
        let basis = kernel_basis(&rows);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], int_vec(&[1, -1, 1, -1]));
    }

    #[test]
    fn smith_normal_form_diagonals() {
        let m = vec![
            int_vec(&[2, 4, 4]),
            int_vec(&[-6, 6, 12]),
            int_vec(&[10, 4, 16]),
        ];
        assert_eq!(
            smith_normal_diagonal(&m),
            vec![Int::from(2), Int::from(2), Int::from(156)]
        );
        // Saturated: unimodular row span.
        let sat = vec![int_vec(&[1, 0, 0]), int_vec(&[-1, -1, 2])];
        assert!(is_saturated(&sat));
        // Index-two sublattice of the plane: not saturated.
        let unsat = vec![int_vec(&[1, 1, 0]), int_vec(&[1, -1, 0])];
        assert!(!is_saturated(&unsat));
    }

    #[test]
    fn saturation_matches_brute_force_on_small_boxes() {
        // Independent oracle: enumerate integer points of the real span in a
        // small box and test membership in the integer row span.
        let cases: Vec<Vec<Vec<Int>>> = vec![
            vec![int_vec(&[1, 0, 0]), int_vec(&[-1, -1, 2])],
            vec![int_vec(&[1, 1, 0]), int_vec(&[1, -1, 0])],
            vec![int_vec(&[0, 1, 0]), int_vec(&[-1, -1, 2])],
            vec![int_vec(&[2, 1, 1]), int_vec(&[1, 2, 1])],
            vec![int_vec(&[1, 2, 3])],
        ];
        for rows in cases {
            let expected = brute_force_saturated(&rows, 3);
            assert_eq!(is_saturated(&rows), expected, "rows {rows:?}");
        }
    }

    fn brute_force_saturated(rows: &[Vec<Int>], radius: i64) -> bool {
        let dim = rows[0].len();
        assert_eq!(dim, 3, "oracle written for 3-dimensional boxes");
        let rat_rows: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        // Transpose: membership of v in the real/integer row span solves
        // rowsᵀ · c = v.
        let cols: Vec<Vec<Rat>> = (0..dim)
            .map(|j| rat_rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        for x in -radius..=radius {
            for y in -radius..=radius {
                for z in -radius..=radius {
                    let v = vec![rat_int(x), rat_int(y), rat_int(z)];
                    if let Some(c) = solve(&cols, &v) {
                        let integral = c.iter().all(|ci| ci.denom().is_one());
                        if !integral {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn determinant_and_inverse() {
        let m = vec![rat_vec(&[2, 1]), rat_vec(&[1, 1])];
        assert_eq!(det(&m), rat_int(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[0], vec![rat_int(1), rat_int(-1)]);
        assert_eq!(inv[1], vec![rat_int(-1), rat_int(2)]);
        let sing = vec![rat_vec(&[1, 2]), rat_vec(&[2, 4])];
        assert!(inverse(&sing).is_none());
        assert_eq!(det(&sing), rat_int(0));
    }

    #[test]
    fn primitive_normalization() {
        assert_eq!(
            primitive(&int_vec(&[4, -6, 2])).unwrap(),
            int_vec(&[2, -3, 1])
        );
        assert!(primitive(&int_vec(&[0, 0])).is_none());
        let v = vec![rat(-1, 2), rat(1, 3)];
        assert_eq!(primitive_from_rat(&v).unwrap(), int_vec(&[3, -2]));
    }
}
