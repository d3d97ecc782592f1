//! Exact feasibility for `{w ≥ 0, Σw = 1, Gw ≤ 0}` over the rationals.

use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpMethod {
    FourierMotzkin,
    Simplex,
}

/// Problems with at most this many rows go through Fourier–Motzkin.
pub const FOURIER_MOTZKIN_ROWS: usize = 4;

pub fn default_method(rows: usize) -> LpMethod {
    if rows <= FOURIER_MOTZKIN_ROWS {
        LpMethod::FourierMotzkin
    } else {
        LpMethod::Simplex
    }
}

/// A point of the simplex with `Σⱼ g[i][j]·w[j] ≤ 0` for every row, or
/// `None` if there is none.
pub fn find_mixture(rows: &[Vec<Q>], dim: usize, method: LpMethod) -> Option<Vec<Q>> {
    assert!(dim > 0, "the simplex of dimension 0 is empty");
    assert!(rows.iter().all(|r| r.len() == dim), "row length differs from dimension");
    match method {
        LpMethod::FourierMotzkin => fourier_motzkin(rows, dim),
        LpMethod::Simplex => simplex(rows, dim),
    }
}

pub fn is_feasible_point(rows: &[Vec<Q>], w: &[Q]) -> bool {
    w.iter().all(|x| !x.is_negative())
        && w.iter().sum::<Q>().is_one()
        && rows.iter().all(|r| dot(r, w) <= Q::zero())
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ coef[j]·x[j] ≤ rhs`.
#[derive(Debug, Clone)]
struct Ineq {
    coef: Vec<Q>,
    rhs: Q,
}

/// Eliminates `w[dim-1] = 1 − Σ others`, then the remaining variables one by
/// one, and back-substitutes the midpoint of each variable's interval.
fn fourier_motzkin(rows: &[Vec<Q>], dim: usize) -> Option<Vec<Q>> {
    let k = dim - 1;
    let mut system = Vec::new();
    for r in rows {
        let last = &r[k];
        system.push(Ineq { coef: (0..k).map(|j| &r[j] - last).collect(), rhs: -last });
    }
    for j in 0..k {
        let mut coef = vec![Q::zero(); k];
        coef[j] = -Q::one();
        system.push(Ineq { coef, rhs: Q::zero() });
    }
    system.push(Ineq { coef: vec![Q::one(); k], rhs: Q::one() });

    let mut stages = Vec::with_capacity(k + 1);
    for v in (0..k).rev() {
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for e in system {
            if e.coef[v].is_zero() {
                rest.push(e);
            } else if e.coef[v].is_negative() {
                lower.push(e);
            } else {
                upper.push(e);
            }
        }
        let mut next = rest.clone();
        for u in &upper {
            for l in &lower {
                let (a, b) = (&u.coef[v], -&l.coef[v]);
                let coef = u.coef.iter().zip(&l.coef).map(|(x, y)| &(x * &b) + &(y * a)).collect();
                next.push(Ineq { coef, rhs: &(&u.rhs * &b) + &(&l.rhs * a) });
            }
        }
        dedup(&mut next);
        let mut stage = upper;
        stage.extend(lower);
        stages.push(stage);
        system = next;
    }
    if system.iter().any(|e| e.rhs.is_negative()) {
        return None;
    }
    let mut x = vec![Q::zero(); k];
    for (v, stage) in (0..k).zip(stages.iter().rev()) {
        let (mut lo, mut hi): (Option<Q>, Option<Q>) = (None, None);
        for e in stage {
            let partial: Q = (0..v).map(|j| &e.coef[j] * &x[j]).sum();
            let bound = &(&e.rhs - &partial) / &e.coef[v];
            if e.coef[v].is_negative() {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            }
        }
        x[v] = match (lo, hi) {
            (Some(l), Some(h)) => &(&l + &h) / &Q::from_integer(2),
            (Some(l), None) => l,
            (None, Some(h)) => h.min(Q::zero()),
            (None, None) => Q::zero(),
        };
    }
    let last = &Q::one() - &x.iter().sum::<Q>();
    x.push(last);
    Some(x)
}

fn dedup(system: &mut Vec<Ineq>) {
    let mut seen: Vec<(Vec<Q>, Q)> = Vec::new();
    system.retain(|e| {
        let scale = e.coef.iter().find(|c| !c.is_zero()).map(Q::abs);
        let key = match scale {
            Some(s) => (e.coef.iter().map(|c| c / &s).collect(), &e.rhs / &s),
            None => (e.coef.clone(), e.rhs.clone()),
        };
        if seen.contains(&key) {
            false
        } else {
            seen.push(key);
            true
        }
    });
}

/// Phase-1 simplex with Bland's rule on `Gw + s = 0, Σw = 1, w, s ≥ 0`,
/// one artificial variable per equality row.
fn simplex(rows: &[Vec<Q>], dim: usize) -> Option<Vec<Q>> {
    let m = rows.len() + 1;
    let n = dim + rows.len();
    let width = n + m;
    // Tableau rows: [structural | slack | artificial | rhs].
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m);
    for (i, r) in rows.iter().enumerate() {
        let mut row = vec![Q::zero(); width + 1];
        row[..dim].clone_from_slice(r);
        row[dim + i] = Q::one();
        row[n + i] = Q::one();
        t.push(row);
    }
    let mut sum_row = vec![Q::zero(); width + 1];
    for c in sum_row.iter_mut().take(dim) {
        *c = Q::one();
    }
    sum_row[n + m - 1] = Q::one();
    sum_row[width] = Q::one();
    t.push(sum_row);
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of `min Σ artificial`.
    let mut cost = vec![Q::zero(); width + 1];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }

    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) else { break };
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter] > Q::zero() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase 1 is bounded below");
        let pivot = t[r][enter].clone();
        for c in t[r].iter_mut() {
            *c = &*c / &pivot;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (c, p) in row.iter_mut().zip(&prow) {
                    *c = &*c - &(&f * p);
                }
            }
        }
        let f = cost[enter].clone();
        for (c, p) in cost.iter_mut().zip(&prow) {
            *c = &*c - &(&f * p);
        }
        basis[r] = enter;
    }
    if !cost[width].is_zero() {
        return None;
    }
    let mut w = vec![Q::zero(); dim];
    for (i, &b) in basis.iter().enumerate() {
        if b < dim {
            w[b] = t[i][width].clone();
        }
    }
    Some(w)
}
