use crate::engine::expm::matrix_exp_minus_identity;
use crate::engine::{EngineError, ExpOptions, MethodSpec};
use crate::linalg::DenseMatrix;
use crate::model::{InfluenceMatrix, MatrixKind};
use crate::scalar::Scalar;

/// Column sums within this distance of 0 or 1 are accepted by PageRank.
const STOCHASTIC_SLACK: f64 = 1e-9;

/// PWP: `(e^{λD} - I) / (e^λ - 1)`, a path of length `k` weighted by `λ^k/k!`.
pub fn pwp<T: Scalar>(
    direct: &InfluenceMatrix<T>,
    lambda: T,
    opts: &ExpOptions<T>,
) -> Result<InfluenceMatrix<T>, EngineError> {
    let spec = MethodSpec::pwp(lambda)?;
    let numerator = matrix_exp_minus_identity(&direct.values().scale(lambda), opts)?;
    let denominator = lambda.exp_m1();
    if !denominator.is_finite() {
        return Err(EngineError::Overflow(format!("e^lambda - 1 for lambda = {lambda}")));
    }
    let values = numerator.scale(T::one() / denominator);
    if !values.is_finite() {
        return Err(EngineError::Overflow(format!(
            "PWP normalization for lambda = {lambda}"
        )));
    }
    Ok(direct.derive(values, MatrixKind::Indirect { method: spec }))
}

/// MICMAC: the `k`-th matrix power, by binary exponentiation.
pub fn micmac<T: Scalar>(
    direct: &InfluenceMatrix<T>,
    k: u32,
) -> Result<InfluenceMatrix<T>, EngineError> {
    let spec = MethodSpec::micmac(k)?;
    let mut base = direct.values().clone();
    let mut acc: Option<DenseMatrix<T>> = None;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.matmul(&base)?,
            });
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base)?;
        }
    }
    let values = acc.expect("k >= 1");
    Ok(direct.derive(values, MatrixKind::Indirect { method: spec }))
}

/// Heat Kernel: `e^{λ(D - I)}`.
pub fn heat_kernel<T: Scalar>(
    direct: &InfluenceMatrix<T>,
    lambda: T,
    opts: &ExpOptions<T>,
) -> Result<InfluenceMatrix<T>, EngineError> {
    let spec = MethodSpec::heat_kernel(lambda)?;
    let generator = direct.values().shift_diagonal(-T::one()).scale(lambda);
    let values = matrix_exp_minus_identity(&generator, opts)?.shift_diagonal(T::one());
    Ok(direct.derive(values, MatrixKind::Indirect { method: spec }))
}

/// Divides every nonzero column by its sum; zero columns stay zero.
pub fn column_normalize<T: Scalar>(
    direct: &InfluenceMatrix<T>,
) -> Result<InfluenceMatrix<T>, EngineError> {
    let v = direct.values();
    let n = direct.dim();
    for i in 0..n {
        for j in 0..n {
            if v[(i, j)] < T::zero() || v[(i, j)].is_nan() {
                return Err(EngineError::NegativeEntry {
                    row: direct.labels()[i].clone(),
                    col: direct.labels()[j].clone(),
                });
            }
        }
    }
    let sums = v.col_sums();
    let values = DenseMatrix::from_fn(n, n, |i, j| {
        if sums[j] > T::zero() {
            v[(i, j)] / sums[j]
        } else {
            T::zero()
        }
    });
    Ok(direct
        .derive(values, direct.kind().clone())
        .mark_column_normalized())
}

/// PageRank limit `lim_k M^k` with `M = p·D̄ + (1 - p)·E_n`, where `D̄`
/// replaces zero columns of `D` by `1/n` and `E_n` has every entry `1/n`.
///
/// `M` is column-stochastic and primitive, so the limit is the rank-one
/// matrix whose every column is the stationary vector of `M`. The vector is
/// found by power iteration and then broadcast.
pub fn pagerank_limit<T: Scalar>(
    direct: &InfluenceMatrix<T>,
    p: T,
    tolerance: T,
    max_iters: usize,
) -> Result<InfluenceMatrix<T>, EngineError> {
    let spec = MethodSpec::pagerank(p)?;
    if !(tolerance > T::zero()) {
        return Err(EngineError::InvalidParameter {
            name: "tolerance",
            value: tolerance.to_string(),
            reason: "must be positive",
        });
    }
    let n = direct.dim();
    let v = direct.values();
    let slack = T::lit(STOCHASTIC_SLACK);

    let mut dangling = vec![false; n];
    for (j, &sum) in v.col_sums().iter().enumerate() {
        let label = || direct.labels()[j].clone();
        if let Some(i) = (0..n).find(|&i| !(v[(i, j)] >= T::zero())) {
            return Err(EngineError::ColumnStochasticityViolation {
                column: label(),
                reason: format!("negative entry in row {}", direct.labels()[i]),
            });
        }
        if sum.abs() <= slack {
            dangling[j] = true;
        } else if (sum - T::one()).abs() > slack {
            return Err(EngineError::ColumnStochasticityViolation {
                column: label(),
                reason: format!("column sum {sum} is neither 0 nor 1"),
            });
        }
    }

    let inv_n = T::one() / T::from_usize_lossy(n.max(1));
    let teleport = (T::one() - p) * inv_n;
    let mut x = vec![inv_n; n];
    let mut converged = n == 0;
    for _ in 0..max_iters {
        if converged {
            break;
        }
        let mass: T = x.iter().copied().sum();
        let dangling_mass: T = x
            .iter()
            .zip(&dangling)
            .filter(|(_, &d)| d)
            .map(|(&xi, _)| xi)
            .sum();
        let mut next = vec![T::zero(); n];
        for (i, out) in next.iter_mut().enumerate() {
            let linked: T = (0..n)
                .filter(|&j| !dangling[j])
                .map(|j| v[(i, j)] * x[j])
                .sum();
            *out = p * (linked + dangling_mass * inv_n) + teleport * mass;
        }
        let delta = x
            .iter()
            .zip(&next)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
        x = next;
        converged = delta < tolerance;
    }
    if !converged {
        return Err(EngineError::NoConvergence {
            iterations: max_iters,
        });
    }

    let values = DenseMatrix::from_fn(n, n, |i, _| x[i]);
    Ok(direct.derive(values, MatrixKind::Indirect { method: spec }))
}
