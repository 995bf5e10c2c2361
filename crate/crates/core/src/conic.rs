//! Phase-I simplex for conic membership, Carathéodory support reduction, and halfspace
//! consistency.
//!
//! Everything here is generic over [`Scalar`]. A conic instance asks whether the target `x`
//! is a nonnegative combination of the generators `z_i`; a feasible answer is a basic
//! solution (support at most `d`), an infeasible one carries a separating direction `w`
//! with `w·z_i >= 0` for every generator and `w·x < 0`.
//!
//! Halfspace consistency (`w·p >= 0` on positives, `w·q <= -1` on negatives) is decided
//! through its Farkas alternative, which is itself a conic instance in `d + 1` dimensions.
//! This keeps a single LP encoding for both questions.

use crate::error::{CertError, Result};
use crate::scalar::{dot, max_abs, Scalar};

#[derive(Debug, Clone, Copy)]
pub struct LpSettings<T> {
    /// Absolute tolerance for pivots, reduced costs, and zero-snapping.
    pub tol: T,
    /// Pivot cap; `0` selects `50 * (rows + cols) + 1000`.
    pub max_pivots: usize,
}

impl<T: Scalar> Default for LpSettings<T> {
    fn default() -> Self {
        LpSettings {
            tol: T::default_tolerance(),
            max_pivots: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicInstance<T> {
    generators: Vec<Vec<T>>,
    target: Vec<T>,
}

impl<T: Scalar> ConicInstance<T> {
    pub fn new(generators: Vec<Vec<T>>, target: Vec<T>) -> Result<Self> {
        if target.is_empty() {
            return Err(CertError::input("conic instance needs dimension >= 1"));
        }
        if let Some((i, g)) = generators.iter().enumerate().find(|(_, g)| g.len() != target.len()) {
            return Err(CertError::input(format!(
                "generator {i} has dimension {}, target has {}",
                g.len(),
                target.len()
            )));
        }
        Ok(ConicInstance { generators, target })
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Vec<T>] {
        &self.generators
    }

    pub fn target(&self) -> &[T] {
        &self.target
    }

    /// `‖Σ α_i z_i − x‖_∞`.
    pub fn residual(&self, coefficients: &[T]) -> T {
        let mut acc = self.target.iter().map(|&x| -x).collect::<Vec<_>>();
        for (g, &a) in self.generators.iter().zip(coefficients) {
            if a != T::zero() {
                for (r, &z) in acc.iter_mut().zip(g) {
                    *r += a * z;
                }
            }
        }
        max_abs(&acc)
    }

    /// Scale used to turn the absolute tolerance into a residual bound.
    fn scale(&self) -> T {
        let gmax = self.generators.iter().fold(T::zero(), |m, g| m.max(max_abs(g)));
        T::one().max(gmax).max(max_abs(&self.target))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConicSolution<T> {
    Feasible {
        coefficients: Vec<T>,
        support: Vec<usize>,
        residual: T,
    },
    Infeasible {
        separator: Vec<T>,
    },
}

impl<T: Scalar> ConicSolution<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ConicSolution::Feasible { .. })
    }

    pub fn support(&self) -> &[usize] {
        match self {
            ConicSolution::Feasible { support, .. } => support,
            ConicSolution::Infeasible { .. } => &[],
        }
    }

    pub fn coefficients(&self) -> Option<&[T]> {
        match self {
            ConicSolution::Feasible { coefficients, .. } => Some(coefficients),
            ConicSolution::Infeasible { .. } => None,
        }
    }

    pub fn separator(&self) -> Option<&[T]> {
        match self {
            ConicSolution::Infeasible { separator } => Some(separator),
            ConicSolution::Feasible { .. } => None,
        }
    }
}

enum PhaseOne<T> {
    /// Values of the structural variables at a basic feasible solution.
    Feasible(Vec<T>),
    /// Farkas vector `y` with `Aᵀy <= 0` and `bᵀy > 0`.
    Infeasible(Vec<T>),
}

/// Dense Phase-I tableau for `{v >= 0 : A v = b}` with one artificial per row.
struct Tableau<T> {
    rows: usize,
    cols: usize,
    width: usize,
    cells: Vec<T>,
    cost: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn new(columns: &[Vec<T>], rhs: &[T], row_sign: &[T]) -> Self {
        let rows = rhs.len();
        let cols = columns.len();
        let width = cols + rows + 1;
        let mut cells = vec![T::zero(); rows * width];
        for i in 0..rows {
            let s = row_sign[i];
            for (j, col) in columns.iter().enumerate() {
                cells[i * width + j] = s * col[i];
            }
            cells[i * width + cols + i] = T::one();
            cells[i * width + width - 1] = s * rhs[i];
        }
        let mut cost = vec![T::zero(); width];
        for i in 0..rows {
            for j in 0..cols {
                cost[j] -= cells[i * width + j];
            }
            cost[width - 1] -= cells[i * width + width - 1];
        }
        Tableau {
            rows,
            cols,
            width,
            cells,
            cost,
            basis: (cols..cols + rows).collect(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.cells[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        for j in 0..w {
            self.cells[r * w + j] /= p;
        }
        self.cells[r * w + c] = T::one();
        let (before, rest) = self.cells.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[c];
            if f != T::zero() {
                for (x, &y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = T::zero();
            }
        }
        let f = self.cost[c];
        if f != T::zero() {
            for (x, &y) in self.cost.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            self.cost[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index entering column, and among near-tied ratios the row whose
    /// basic variable has the lowest index.
    fn run(&mut self, settings: &LpSettings<T>) -> Result<()> {
        let tol = settings.tol;
        let cap = if settings.max_pivots == 0 {
            50 * (self.rows + self.cols) + 1000
        } else {
            settings.max_pivots
        };
        let rhs = self.width - 1;
        let mut is_basic = vec![false; self.cols + self.rows];
        for &b in &self.basis {
            is_basic[b] = true;
        }
        for _ in 0..cap {
            let Some(enter) = (0..self.cols).find(|&j| !is_basic[j] && self.cost[j] < -tol) else {
                return Ok(());
            };
            let ratio = |i: usize| self.at(i, rhs).max(T::zero()) / self.at(i, enter);
            let eligible: Vec<usize> = (0..self.rows).filter(|&i| self.at(i, enter) > tol).collect();
            let best = eligible.iter().map(|&i| ratio(i)).fold(T::infinity(), T::min);
            let leave = eligible
                .into_iter()
                .filter(|&i| ratio(i) <= best + tol)
                .min_by_key(|&i| self.basis[i]);
            let Some(row) = leave else {
                return Err(CertError::Numerical("phase-one objective reported unbounded".into()));
            };
            is_basic[self.basis[row]] = false;
            is_basic[enter] = true;
            self.pivot(row, enter);
        }
        Err(CertError::Numerical(format!(
            "simplex exceeded {cap} pivots (cycling guard)"
        )))
    }
}

fn phase_one<T: Scalar>(columns: &[Vec<T>], rhs: &[T], settings: &LpSettings<T>) -> Result<PhaseOne<T>> {
    let rows = rhs.len();
    let cols = columns.len();
    let row_sign: Vec<T> = rhs
        .iter()
        .map(|&b| if b < T::zero() { -T::one() } else { T::one() })
        .collect();
    let mut tab = Tableau::new(columns, rhs, &row_sign);
    tab.run(settings)?;

    let objective = -tab.cost[tab.width - 1];
    let bnorm = rhs.iter().fold(T::zero(), |acc, &b| acc + b.abs());
    let feas_tol = settings.tol * (T::one() + bnorm);
    if objective <= feas_tol {
        // recover the basic solution from the original data to shed accumulated pivot error
        let mut basis_cols: Vec<Vec<T>> = Vec::with_capacity(rows);
        for &b in &tab.basis {
            if b < cols {
                basis_cols.push(columns[b].clone());
            } else {
                let mut e = vec![T::zero(); rows];
                e[b - cols] = row_sign[b - cols];
                basis_cols.push(e);
            }
        }
        let solved = solve_square(&basis_cols, rhs, settings.tol);
        let mut values = vec![T::zero(); cols];
        for (k, &b) in tab.basis.iter().enumerate() {
            if b < cols {
                let v = match &solved {
                    Some(sol) => sol[k],
                    None => tab.at(k, tab.width - 1),
                };
                values[b] = if v > settings.tol { v } else { T::zero() };
            }
        }
        Ok(PhaseOne::Feasible(values))
    } else {
        let y = (0..rows)
            .map(|i| row_sign[i] * (T::one() - tab.cost[cols + i]))
            .collect();
        Ok(PhaseOne::Infeasible(y))
    }
}

/// Solves `B v = b` where `B` is given by columns; `None` if numerically singular.
fn solve_square<T: Scalar>(columns: &[Vec<T>], rhs: &[T], tol: T) -> Option<Vec<T>> {
    let n = rhs.len();
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row: Vec<T> = columns.iter().map(|c| c[i]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap())?;
        if m[p][c].abs() <= tol * T::lit(1e-3) {
            return None;
        }
        m.swap(c, p);
        let pivot = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            let f = row[c] / pivot[c];
            if r != c && f != T::zero() {
                for (x, &v) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * v;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn support_of<T: Scalar>(coefficients: &[T]) -> Vec<usize> {
    coefficients
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > T::zero())
        .map(|(i, _)| i)
        .collect()
}

/// Decides `x ∈ cone(z_1, ..., z_n)`.
///
/// Feasible answers are basic solutions (support at most `d`); infeasible answers carry a
/// separator normalized to unit max-norm.
pub fn conic_membership<T: Scalar>(instance: &ConicInstance<T>, settings: &LpSettings<T>) -> Result<ConicSolution<T>> {
    let tol = settings.tol;
    let d = instance.dim();
    let n = instance.len();
    if max_abs(&instance.target) <= tol {
        return Ok(ConicSolution::Feasible {
            coefficients: vec![T::zero(); n],
            support: Vec::new(),
            residual: max_abs(&instance.target),
        });
    }
    let scale = instance.scale();
    match phase_one(&instance.generators, &instance.target, settings)? {
        PhaseOne::Feasible(coefficients) => {
            let support = support_of(&coefficients);
            if support.len() > d {
                return Err(CertError::Numerical(format!(
                    "basic solution has support {} > dimension {d}",
                    support.len()
                )));
            }
            let residual = instance.residual(&coefficients);
            if residual > T::lit(10.0) * tol * scale {
                return Err(CertError::Numerical(format!(
                    "conic solution residual {residual} exceeds tolerance"
                )));
            }
            Ok(ConicSolution::Feasible {
                coefficients,
                support,
                residual,
            })
        }
        PhaseOne::Infeasible(y) => {
            let norm = max_abs(&y);
            if norm == T::zero() {
                return Err(CertError::Numerical("empty Farkas vector".into()));
            }
            let separator: Vec<T> = y.iter().map(|&v| -v / norm).collect();
            let slack = T::lit(10.0) * tol * scale;
            let bad = instance.generators.iter().any(|g| dot(&separator, g) < -slack);
            if bad || dot(&separator, &instance.target) >= T::zero() {
                return Err(CertError::Numerical("separator failed re-verification".into()));
            }
            Ok(ConicSolution::Infeasible { separator })
        }
    }
}

/// Reduces a conic combination to support at most `d` by repeatedly stepping along a
/// linear dependency of the current support.
pub fn caratheodory_reduce<T: Scalar>(
    instance: &ConicInstance<T>,
    coefficients: &[T],
    settings: &LpSettings<T>,
) -> Result<ConicSolution<T>> {
    let tol = settings.tol;
    let d = instance.dim();
    if coefficients.len() != instance.len() {
        return Err(CertError::input(format!(
            "{} coefficients for {} generators",
            coefficients.len(),
            instance.len()
        )));
    }
    if coefficients.iter().any(|&a| a < -tol || !a.is_finite()) {
        return Err(CertError::input("coefficients must be nonnegative"));
    }
    let scale = instance.scale();
    let start_residual = instance.residual(coefficients);
    if start_residual > T::lit(10.0) * tol * scale {
        return Err(CertError::input(format!(
            "coefficients do not represent the target (residual {start_residual})"
        )));
    }
    let mut alpha: Vec<T> = coefficients
        .iter()
        .map(|&a| if a > tol { a } else { T::zero() })
        .collect();
    let mut support = support_of(&alpha);
    while support.len() > d {
        let beta = dependency(instance, &support, tol).ok_or_else(|| {
            CertError::Numerical(format!(
                "no linear dependency found on support of size {} in dimension {d}",
                support.len()
            ))
        })?;
        let mut step: Option<(usize, T)> = None;
        for (k, &i) in support.iter().enumerate() {
            if beta[k] > tol {
                let t = alpha[i] / beta[k];
                if step.is_none_or(|(_, best)| t < best) {
                    step = Some((k, t));
                }
            }
        }
        let (kmin, t) = step.expect("dependency has a positive entry");
        for (k, &i) in support.iter().enumerate() {
            alpha[i] -= t * beta[k];
            if alpha[i] <= tol {
                alpha[i] = T::zero();
            }
        }
        alpha[support[kmin]] = T::zero();
        support = support_of(&alpha);
    }
    let residual = instance.residual(&alpha);
    Ok(ConicSolution::Feasible {
        coefficients: alpha,
        support,
        residual,
    })
}

/// A nonzero `β` with `Σ β_k z_{support[k]} = 0` and at least one positive entry.
fn dependency<T: Scalar>(instance: &ConicInstance<T>, support: &[usize], tol: T) -> Option<Vec<T>> {
    let d = instance.dim();
    let k = support.len();
    let mut m: Vec<Vec<T>> = (0..d)
        .map(|r| support.iter().map(|&i| instance.generators[i][r]).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut free = None;
    for c in 0..k {
        let row = pivot_cols.len();
        if row == d {
            free = Some(c);
            break;
        }
        let p = (row..d).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap())?;
        if m[p][c].abs() <= tol {
            free = Some(c);
            break;
        }
        m.swap(row, p);
        let pv = m[row][c];
        for x in m[row].iter_mut() {
            *x /= pv;
        }
        let pivot = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            let f = other[c];
            if r != row && f != T::zero() {
                for (x, &v) in other.iter_mut().zip(&pivot) {
                    *x -= f * v;
                }
            }
        }
        pivot_cols.push(c);
    }
    let f = free?;
    let mut beta = vec![T::zero(); k];
    beta[f] = T::one();
    for (r, &c) in pivot_cols.iter().enumerate() {
        beta[c] = -m[r][f];
    }
    Some(beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `w·v >= 0`
    NonNegative,
    /// `w·v <= -1`
    AtMostMinusOne,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Consistency<T> {
    Consistent {
        witness: Vec<T>,
    },
    /// Farkas multipliers over the constraints (positives, then negatives, then the extra
    /// constraint), proving no consistent `w` exists.
    Inconsistent {
        multipliers: Vec<T>,
    },
}

impl<T: Scalar> Consistency<T> {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent { .. })
    }

    pub fn witness(&self) -> Option<&[T]> {
        match self {
            Consistency::Consistent { witness } => Some(witness),
            Consistency::Inconsistent { .. } => None,
        }
    }
}

/// Feasibility of `{w : w·p >= 0 ∀p, w·q <= -1 ∀q, extra}`.
pub fn halfspace_consistency_lp<T: Scalar>(
    positives: &[Vec<T>],
    negatives: &[Vec<T>],
    extra: Option<(&[T], Relation)>,
    settings: &LpSettings<T>,
) -> Result<Consistency<T>> {
    let dim = positives
        .first()
        .or(negatives.first())
        .map(|v| v.len())
        .or(extra.map(|(v, _)| v.len()))
        .ok_or_else(|| CertError::input("consistency LP needs at least one constraint"))?;
    // each constraint is a·w >= c with c ∈ {0, 1}; the Farkas alternative asks for
    // λ >= 0 with Σ λ a = 0 and Σ λ c = 1, i.e. (0, ..., 0, 1) ∈ cone{(a, c)}
    let mut rows: Vec<(Vec<T>, T)> = Vec::with_capacity(positives.len() + negatives.len() + 1);
    rows.extend(positives.iter().map(|p| (p.clone(), T::zero())));
    rows.extend(negatives.iter().map(|q| (q.iter().map(|&v| -v).collect(), T::one())));
    if let Some((v, rel)) = extra {
        rows.push(match rel {
            Relation::NonNegative => (v.to_vec(), T::zero()),
            Relation::AtMostMinusOne => (v.iter().map(|&x| -x).collect(), T::one()),
        });
    }
    if let Some((a, _)) = rows.iter().find(|(a, _)| a.len() != dim) {
        return Err(CertError::input(format!(
            "constraint of dimension {} in a {dim}-dimensional LP",
            a.len()
        )));
    }
    let generators: Vec<Vec<T>> = rows
        .iter()
        .map(|(a, c)| {
            let mut g = a.clone();
            g.push(*c);
            g
        })
        .collect();
    let mut target = vec![T::zero(); dim + 1];
    target[dim] = T::one();
    let instance = ConicInstance::new(generators, target)?;
    match conic_membership(&instance, settings)? {
        ConicSolution::Feasible { coefficients, .. } => Ok(Consistency::Inconsistent {
            multipliers: coefficients,
        }),
        ConicSolution::Infeasible { separator } => {
            let s = separator[dim];
            if s >= T::zero() {
                return Err(CertError::Numerical("degenerate consistency separator".into()));
            }
            let witness: Vec<T> = separator[..dim].iter().map(|&v| v / -s).collect();
            let slack = T::lit(100.0) * settings.tol * (T::one() + max_abs(&witness));
            for (a, c) in &rows {
                if dot(a, &witness) < *c - slack * T::one().max(max_abs(a)) {
                    return Err(CertError::Numerical(
                        "consistency witness failed re-verification".into(),
                    ));
                }
            }
            Ok(Consistency::Consistent { witness })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(g: &[&[f64]], x: &[f64]) -> ConicInstance<f64> {
        ConicInstance::new(g.iter().map(|v| v.to_vec()).collect(), x.to_vec()).unwrap()
    }

    fn settings() -> LpSettings<f64> {
        LpSettings::default()
    }

    #[test]
    fn coordinate_decomposition() {
        let sol = conic_membership(&inst(&[&[1.0, 0.0], &[0.0, 1.0]], &[2.0, 1.0]), &settings()).unwrap();
        let ConicSolution::Feasible {
            coefficients,
            support,
            residual,
        } = sol
        else {
            panic!("expected feasible");
        };
        assert_eq!(support, vec![0, 1]);
        assert!((coefficients[0] - 2.0).abs() < 1e-12 && (coefficients[1] - 1.0).abs() < 1e-12);
        assert!(residual < 1e-12);
    }

    #[test]
    fn outside_cone_gives_separator() {
        let i = inst(&[&[1.0, 0.0]], &[0.0, -1.0]);
        let sol = conic_membership(&i, &settings()).unwrap();
        let w = sol.separator().expect("infeasible");
        assert!(dot(w, &[1.0, 0.0]) >= 0.0);
        assert!(dot(w, &[0.0, -1.0]) < 0.0);
    }

    #[test]
    fn basic_solution_support_bounded_by_dimension() {
        let i = inst(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]], &[2.0, 1.0]);
        let sol = conic_membership(&i, &settings()).unwrap();
        assert!(sol.is_feasible());
        assert!(sol.support().len() <= 2);
        assert!(i.residual(sol.coefficients().unwrap()) < 1e-9);
    }

    #[test]
    fn zero_target_is_feasible_with_empty_support() {
        let sol = conic_membership(&inst(&[&[1.0, 0.0]], &[0.0, 0.0]), &settings()).unwrap();
        assert!(sol.is_feasible());
        assert!(sol.support().is_empty());
        let sol = conic_membership(&inst(&[], &[0.0]), &settings()).unwrap();
        assert!(sol.is_feasible());
    }

    #[test]
    fn no_generators_nonzero_target_is_infeasible() {
        let sol = conic_membership(&inst(&[], &[1.0, -2.0]), &settings()).unwrap();
        let w = sol.separator().unwrap();
        assert!(dot(w, &[1.0, -2.0]) < 0.0);
    }

    #[test]
    fn reduce_support_three_to_two() {
        let i = inst(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]], &[2.0, 1.0]);
        let sol = caratheodory_reduce(&i, &[1.5, 0.5, 0.5], &settings()).unwrap();
        assert!(sol.support().len() <= 2);
        assert!(i.residual(sol.coefficients().unwrap()) < 1e-12);
    }

    #[test]
    fn reduce_leaves_small_support_alone() {
        let i = inst(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]], &[2.0, 1.0]);
        let sol = caratheodory_reduce(&i, &[1.0, 0.0, 1.0], &settings()).unwrap();
        assert_eq!(sol.coefficients().unwrap(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn reduce_rejects_non_certificate() {
        let i = inst(&[&[1.0, 0.0], &[0.0, 1.0]], &[2.0, 1.0]);
        assert!(caratheodory_reduce(&i, &[1.0, 1.0], &settings()).is_err());
        assert!(caratheodory_reduce(&i, &[2.0, -1.0], &settings()).is_err());
        assert!(caratheodory_reduce(&i, &[2.0], &settings()).is_err());
    }

    #[test]
    fn consistency_examples() {
        let s = settings();
        let c = halfspace_consistency_lp(&[vec![1.0, 0.0]], &[vec![-1.0, 0.0]], None, &s).unwrap();
        let w = c.witness().unwrap();
        assert!(dot(w, &[1.0, 0.0]) >= -1e-9 && dot(w, &[-1.0, 0.0]) <= -1.0 + 1e-9);

        let c = halfspace_consistency_lp(&[vec![1.0, 0.0], vec![-1.0, 0.0]], &[vec![0.0, -1.0]], None, &s).unwrap();
        let w = c.witness().unwrap();
        assert!(dot(w, &[1.0, 0.0]) >= -1e-9);
        assert!(dot(w, &[-1.0, 0.0]) >= -1e-9);
        assert!(dot(w, &[0.0, -1.0]) <= -1.0 + 1e-9);

        let c = halfspace_consistency_lp(&[vec![1.0, 0.0]], &[vec![1.0, 0.0]], None, &s).unwrap();
        let Consistency::Inconsistent { multipliers } = c else {
            panic!("expected inconsistent")
        };
        assert!(multipliers.iter().all(|&m| m >= 0.0));
        assert!(multipliers[1] > 0.0);
    }

    #[test]
    fn consistency_extra_constraint() {
        let s = settings();
        let extra = [0.0, 1.0];
        let c = halfspace_consistency_lp(&[vec![0.0, 1.0]], &[], Some((&extra, Relation::AtMostMinusOne)), &s).unwrap();
        assert!(!c.is_consistent());
        let c = halfspace_consistency_lp(&[vec![1.0, 1.0]], &[], Some((&extra, Relation::AtMostMinusOne)), &s).unwrap();
        assert!(c.is_consistent());
    }

    #[test]
    fn single_precision_engine() {
        let i =
            ConicInstance::<f32>::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], vec![2.0, 1.0]).unwrap();
        let sol = conic_membership(&i, &LpSettings::default()).unwrap();
        assert!(sol.is_feasible());
        assert!(sol.support().len() <= 2);
        let i = ConicInstance::<f32>::new(vec![vec![1.0, 0.0]], vec![0.0, -1.0]).unwrap();
        assert!(!conic_membership(&i, &LpSettings::default()).unwrap().is_feasible());
    }

    /// Independent planar membership test: x is in the cone iff it is a nonnegative
    /// multiple of one generator or a nonnegative combination of some pair.
    fn planar_oracle(gens: &[Vec<f64>], x: &[f64]) -> bool {
        let eps = 1e-7;
        if x[0].abs() < eps && x[1].abs() < eps {
            return true;
        }
        for g in gens {
            let cross = g[0] * x[1] - g[1] * x[0];
            if cross.abs() < eps && g[0] * x[0] + g[1] * x[1] > 0.0 {
                return true;
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                let (a, b) = (&gens[i], &gens[j]);
                let det = a[0] * b[1] - a[1] * b[0];
                if det.abs() < eps {
                    continue;
                }
                let s = (x[0] * b[1] - x[1] * b[0]) / det;
                let t = (a[0] * x[1] - a[1] * x[0]) / det;
                if s >= -eps && t >= -eps {
                    return true;
                }
            }
        }
        false
    }

    fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5i32..=5, d).prop_map(|v| v.into_iter().map(f64::from).collect())
    }

    proptest! {
        #[test]
        fn planar_membership_matches_pair_oracle(
            gens in prop::collection::vec(vec_strategy(2), 0..7),
            x in vec_strategy(2),
        ) {
            let i = ConicInstance::new(gens.clone(), x.clone()).unwrap();
            let sol = conic_membership(&i, &settings()).unwrap();
            prop_assert_eq!(sol.is_feasible(), planar_oracle(&gens, &x));
        }

        #[test]
        fn trichotomy_artifacts_reverify(
            gens in prop::collection::vec(vec_strategy(3), 0..10),
            x in vec_strategy(3),
        ) {
            let i = ConicInstance::new(gens.clone(), x.clone()).unwrap();
            match conic_membership(&i, &settings()).unwrap() {
                ConicSolution::Feasible { coefficients, support, .. } => {
                    prop_assert!(support.len() <= 3);
                    prop_assert!(coefficients.iter().all(|&a| a >= 0.0));
                    prop_assert!(i.residual(&coefficients) <= 1e-8);
                }
                ConicSolution::Infeasible { separator } => {
                    for g in &gens {
                        prop_assert!(dot(&separator, g) >= -1e-8);
                    }
                    prop_assert!(dot(&separator, &x) < 0.0);
                }
            }
        }

        #[test]
        fn reduction_keeps_residual_and_bounds_support(
            gens in prop::collection::vec(vec_strategy(3), 5..9),
            weights in prop::collection::vec(0u32..4, 9),
        ) {
            let alpha: Vec<f64> = gens.iter().zip(&weights).map(|(_, &w)| f64::from(w)).collect();
            let mut x = vec![0.0; 3];
            for (g, a) in gens.iter().zip(&alpha) {
                for r in 0..3 { x[r] += a * g[r]; }
            }
            let i = ConicInstance::new(gens, x).unwrap();
            let before = alpha.iter().filter(|&&a| a > 0.0).count();
            let sol = caratheodory_reduce(&i, &alpha, &settings()).unwrap();
            prop_assert!(sol.support().len() <= 3);
            prop_assert!(sol.support().len() <= before);
            prop_assert!(i.residual(sol.coefficients().unwrap()) <= 1e-9 + 3.0 * 1e-9 * 50.0);
        }
    }
}
