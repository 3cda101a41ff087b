//! Brute-force oracles and random instance builders shared by the integration
//! tests. Nothing here calls the simplex or branch-and-bound code.

#![allow(dead_code)]

use pnf_core::model::{MipModel, Sense, VarId, VariableSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bounded LP with `n` columns and `m` rows. Right-hand sides are
/// derived from a random interior point, so most instances are feasible.
pub fn random_lp(seed: u64, n: usize, m: usize) -> MipModel {
    let mut r = rng(seed);
    let mut model = MipModel::new(format!("lp{seed}"));
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        let lb = -(r.gen_range(0..=3) as f64);
        let ub = lb + r.gen_range(1..=4) as f64;
        let cost = r.gen_range(-5..=5) as f64;
        model
            .add_variable(VariableSpec::continuous(format!("x{j}"), lb, ub).with_cost(cost))
            .unwrap();
        point.push(r.gen_range(lb..=ub));
    }
    for i in 0..m {
        let mut terms = Vec::new();
        for j in 0..n {
            if r.gen_bool(0.7) {
                let a = r.gen_range(-5..=5) as f64;
                if a != 0.0 {
                    terms.push((VarId(j), a));
                }
            }
        }
        if terms.is_empty() {
            terms.push((VarId(r.gen_range(0..n)), 1.0));
        }
        let act: f64 = terms.iter().map(|&(v, a)| a * point[v.0]).sum();
        let sense = match r.gen_range(0..5) {
            0 => Sense::Eq,
            1 | 2 => Sense::Le,
            _ => Sense::Ge,
        };
        let rhs = match sense {
            Sense::Eq => act.round(),
            Sense::Le => (act + r.gen_range(-1.0..3.0)).round(),
            Sense::Ge => (act - r.gen_range(-1.0..3.0)).round(),
        };
        model.add_constraint(format!("r{i}"), terms, sense, rhs).unwrap();
    }
    model
}

/// Random pure-binary MIP; about half of the instances are built around a
/// planted feasible point.
pub fn random_binary_mip(seed: u64, n: usize, m: usize) -> MipModel {
    let mut r = rng(seed);
    let mut model = MipModel::new(format!("mip{seed}"));
    for j in 0..n {
        let cost = r.gen_range(-10..=10) as f64;
        model
            .add_variable(VariableSpec::binary(format!("b{j}")).with_cost(cost))
            .unwrap();
    }
    let planted: Vec<f64> = (0..n).map(|_| if r.gen_bool(0.5) { 1.0 } else { 0.0 }).collect();
    let plant = r.gen_bool(0.5);
    for i in 0..m {
        let mut terms = Vec::new();
        for j in 0..n {
            if r.gen_bool(0.5) {
                let a = r.gen_range(-6..=9) as f64;
                if a != 0.0 {
                    terms.push((VarId(j), a));
                }
            }
        }
        if terms.is_empty() {
            terms.push((VarId(r.gen_range(0..n)), 1.0));
        }
        let sense = match r.gen_range(0..6) {
            0 => Sense::Eq,
            1 => Sense::Ge,
            _ => Sense::Le,
        };
        let rhs = if plant {
            let act: f64 = terms.iter().map(|&(v, a)| a * planted[v.0]).sum();
            match sense {
                Sense::Eq => act,
                Sense::Le => act + r.gen_range(0..=3) as f64,
                Sense::Ge => act - r.gen_range(0..=3) as f64,
            }
        } else {
            let pos: f64 = terms.iter().map(|&(_, a)| a.max(0.0)).sum();
            (pos * r.gen_range(0.2..0.8)).round()
        };
        model.add_constraint(format!("r{i}"), terms, sense, rhs).unwrap();
    }
    model
}

/// Minimum objective over all `2^n` binary assignments, or `None` when no
/// assignment is feasible. Only valid for models whose columns are all binary.
pub fn enumerate_binary_optimum(model: &MipModel) -> Option<f64> {
    let n = model.num_vars();
    assert!(n <= 20, "enumeration oracle limited to 20 binaries");
    assert!(model.variables().iter().all(|v| v.is_binary()));
    let mut best: Option<f64> = None;
    let mut x = vec![0.0; n];
    for mask in 0u32..(1u32 << n) {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = ((mask >> j) & 1) as f64;
        }
        if rows_ok(model, &x, 1e-9) {
            let obj = naive_objective(model, &x);
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    }
    best
}

/// Minimum objective of a bounded LP by enumerating every candidate vertex:
/// for each subset of rows held at equality and each choice of remaining
/// columns pinned at a bound, solve the square system and keep feasible points.
pub fn enumerate_lp_optimum(model: &MipModel) -> Option<f64> {
    let n = model.num_vars();
    let m = model.num_rows();
    let lbs: Vec<f64> = model.variables().iter().map(|v| v.lb).collect();
    let ubs: Vec<f64> = model.variables().iter().map(|v| v.ub).collect();
    assert!(lbs.iter().chain(&ubs).all(|b| b.is_finite()));
    let dense: Vec<Vec<f64>> = model
        .constraints()
        .iter()
        .map(|row| {
            let mut a = vec![0.0; n];
            for &(v, c) in &row.terms {
                a[v.0] = c;
            }
            a
        })
        .collect();
    let rhs: Vec<f64> = model.constraints().iter().map(|r| r.rhs).collect();

    let mut best: Option<f64> = None;
    let mut x = vec![0.0; n];
    for row_mask in 0u32..(1u32 << m) {
        let active: Vec<usize> = (0..m).filter(|i| (row_mask >> i) & 1 == 1).collect();
        let k = active.len();
        if k > n {
            continue;
        }
        // Choose which k columns stay free; the rest sit at a bound.
        for free in combinations(n, k) {
            let pinned: Vec<usize> = (0..n).filter(|j| !free.contains(j)).collect();
            for side_mask in 0u32..(1u32 << pinned.len()) {
                for (p, &j) in pinned.iter().enumerate() {
                    x[j] = if (side_mask >> p) & 1 == 1 { ubs[j] } else { lbs[j] };
                }
                if k > 0 {
                    let mut a = vec![vec![0.0; k]; k];
                    let mut b = vec![0.0; k];
                    for (r, &i) in active.iter().enumerate() {
                        b[r] = rhs[i];
                        for &j in &pinned {
                            b[r] -= dense[i][j] * x[j];
                        }
                        for (c, &j) in free.iter().enumerate() {
                            a[r][c] = dense[i][j];
                        }
                    }
                    match gauss_solve(a, b) {
                        Some(sol) => {
                            for (c, &j) in free.iter().enumerate() {
                                x[j] = sol[c];
                            }
                        }
                        None => continue,
                    }
                }
                let in_box = (0..n).all(|j| x[j] >= lbs[j] - 1e-9 && x[j] <= ubs[j] + 1e-9);
                if in_box && rows_ok(model, &x, 1e-9) {
                    let obj = naive_objective(model, &x);
                    best = Some(best.map_or(obj, |b: f64| b.min(obj)));
                }
            }
        }
    }
    best
}

pub fn rows_ok(model: &MipModel, x: &[f64], tol: f64) -> bool {
    model.constraints().iter().all(|row| {
        let act: f64 = row.terms.iter().map(|&(v, a)| a * x[v.0]).sum();
        match row.sense {
            Sense::Le => act <= row.rhs + tol,
            Sense::Ge => act >= row.rhs - tol,
            Sense::Eq => (act - row.rhs).abs() <= tol,
        }
    })
}

/// Objective by plain left-to-right summation.
pub fn naive_objective(model: &MipModel, x: &[f64]) -> f64 {
    let mut total = model.objective_constant;
    for (j, var) in model.variables().iter().enumerate() {
        total += var.cost * x[j];
    }
    total
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in 0..k {
            if i != col {
                let f = a[i][col] / a[col][col];
                if f != 0.0 {
                    for c in col..k {
                        a[i][c] -= f * a[col][c];
                    }
                    b[i] -= f * b[col];
                }
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}

/// Shannon entropy (nats) from a hash-map histogram.
pub fn naive_entropy(classes: &[u32]) -> f64 {
    let mut counts = std::collections::HashMap::new();
    for &k in classes {
        *counts.entry(k).or_insert(0u32) += 1;
    }
    let n = classes.len() as f64;
    counts
        .values()
        .map(|&c| {
            let p = f64::from(c) / n;
            -p * p.ln()
        })
        .sum()
}
