use serde::{Deserialize, Serialize};

use crate::dense::gemm::View;
use crate::tt::add_many;
use crate::{Matrix, Result, TtCore, TtError, TtTensor};

/// One factor `A_{i,n}` of a Kronecker term.
///
/// In JSON: `{"dense": [[row], ..]}`, `{"diag": [..]}` or `{"identity": n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeFactor {
    Dense(Vec<Vec<f64>>),
    Diag(Vec<f64>),
    Identity(usize),
}

impl ModeFactor {
    pub fn dense(m: &Matrix) -> Self {
        ModeFactor::Dense(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    pub fn size(&self) -> usize {
        match self {
            ModeFactor::Dense(rows) => rows.len(),
            ModeFactor::Diag(d) => d.len(),
            ModeFactor::Identity(n) => *n,
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.size();
        if n == 0 {
            return Err(TtError::ShapeMismatch("empty mode factor".into()));
        }
        if let ModeFactor::Dense(rows) = self {
            if rows.iter().any(|r| r.len() != n) {
                return Err(TtError::ShapeMismatch(format!(
                    "dense factor with {n} rows is not square"
                )));
            }
        }
        let finite = match self {
            ModeFactor::Dense(rows) => rows.iter().flatten().all(|v| v.is_finite()),
            ModeFactor::Diag(d) => d.iter().all(|v| v.is_finite()),
            ModeFactor::Identity(_) => true,
        };
        if !finite {
            return Err(TtError::InvalidArgument(
                "mode factor has non-finite entries".into(),
            ));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Matrix {
        match self {
            ModeFactor::Dense(rows) => Matrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j]),
            ModeFactor::Diag(d) => Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
            ModeFactor::Identity(n) => Matrix::identity(*n, *n),
        }
    }

    /// Mode-2 product of `core` with this factor.
    fn apply(&self, core: &TtCore, dense: Option<&Matrix>) -> TtCore {
        match self {
            ModeFactor::Identity(_) => core.clone(),
            ModeFactor::Diag(d) => {
                let (rl, mode, rr) = core.shape();
                let src = core.as_slice();
                let mut data = Vec::with_capacity(src.len());
                for b in 0..rr {
                    for (i, di) in d.iter().enumerate() {
                        let off = rl * (i + mode * b);
                        data.extend(src[off..off + rl].iter().map(|v| v * di));
                    }
                }
                TtCore::from_raw(rl, mode, rr, data)
            }
            ModeFactor::Dense(_) => core.mul_mode(View::of(dense.expect("dense factor cached"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OperatorJson {
    terms: Vec<Vec<ModeFactor>>,
}

/// `sum_i A_{i,1} (x) ... (x) A_{i,N}` acting on order-`N` TT-tensors.
#[derive(Debug, Clone)]
pub struct KroneckerSumOperator {
    terms: Vec<Vec<ModeFactor>>,
    /// Dense copies of the `Dense` factors, same indexing as `terms`.
    cache: Vec<Vec<Option<Matrix>>>,
    dims: Vec<usize>,
}

impl KroneckerSumOperator {
    pub fn new(terms: Vec<Vec<ModeFactor>>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| TtError::InvalidArgument("operator needs at least one term".into()))?;
        if first.is_empty() {
            return Err(TtError::InvalidArgument(
                "operator terms need at least one mode".into(),
            ));
        }
        let dims: Vec<usize> = first.iter().map(ModeFactor::size).collect();
        for (i, term) in terms.iter().enumerate() {
            if term.len() != dims.len() {
                return Err(TtError::DimensionMismatch(format!(
                    "term {i} has {} modes, expected {}",
                    term.len(),
                    dims.len()
                )));
            }
            for (n, f) in term.iter().enumerate() {
                f.check()?;
                if f.size() != dims[n] {
                    return Err(TtError::DimensionMismatch(format!(
                        "term {i} mode {} has size {}, expected {}",
                        n + 1,
                        f.size(),
                        dims[n]
                    )));
                }
            }
        }
        let cache = terms
            .iter()
            .map(|t| {
                t.iter()
                    .map(|f| matches!(f, ModeFactor::Dense(_)).then(|| f.to_matrix()))
                    .collect()
            })
            .collect();
        Ok(KroneckerSumOperator { terms, cache, dims })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let parsed: OperatorJson = serde_json::from_str(s)?;
        Self::new(parsed.terms)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&OperatorJson {
            terms: self.terms.clone(),
        })?)
    }

    pub fn terms(&self) -> &[Vec<ModeFactor>] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn check_input(&self, x: &TtTensor) -> Result<()> {
        if x.dims() != self.dims {
            return Err(TtError::DimensionMismatch(format!(
                "operator acts on dims {:?}, tensor has {:?}",
                self.dims,
                x.dims()
            )));
        }
        Ok(())
    }

    /// Each Kronecker term applied to `x`, in term order (ranks unchanged).
    pub fn apply_terms(&self, x: &TtTensor) -> Result<Vec<TtTensor>> {
        self.check_input(x)?;
        Ok(self
            .terms
            .iter()
            .zip(&self.cache)
            .map(|(term, cache)| {
                let cores = term
                    .iter()
                    .zip(cache)
                    .zip(x.cores())
                    .map(|((f, m), c)| f.apply(c, m.as_ref()))
                    .collect();
                TtTensor::from_cores_unchecked(cores)
            })
            .collect())
    }

    /// Unrounded `A x`: the TT sum of the terms, internal ranks `s R_n`.
    pub fn apply(&self, x: &TtTensor) -> Result<TtTensor> {
        let terms = self.apply_terms(x)?;
        add_many(&terms.iter().collect::<Vec<_>>())
    }

    /// `sum_i A_{i,1}`, the operator the preconditioner inverts.
    pub fn first_mode_sum(&self) -> Matrix {
        let n = self.dims[0];
        self.terms
            .iter()
            .fold(Matrix::zeros(n, n), |acc, t| acc + t[0].to_matrix())
    }

    /// Dense matrix acting on tensors vectorized with the first index
    /// fastest, i.e. `sum_i A_{i,N} (x) ... (x) A_{i,1}`. Test-sized only.
    pub fn to_dense(&self) -> Matrix {
        let total: usize = self.dims.iter().product();
        let mut out = Matrix::zeros(total, total);
        for term in &self.terms {
            let mut k = Matrix::from_element(1, 1, 1.0);
            for f in term {
                k = f.to_matrix().kronecker(&k);
            }
            out += k;
        }
        out
    }
}

/// Right preconditioner `(sum_i A_{i,1})^{-1} (x) I (x) ... (x) I`.
#[derive(Debug, Clone)]
pub struct MeanPreconditioner {
    inverse: Matrix,
}

impl MeanPreconditioner {
    pub fn new(op: &KroneckerSumOperator) -> Result<Self> {
        let a = op.first_mode_sum();
        let scale = a.amax();
        let lu = a.lu();
        let singular = || TtError::SingularOperator("sum of first-mode factors is singular".into());
        let inverse = lu.try_inverse().ok_or_else(singular)?;
        // Reject numerically singular inputs as well as exactly singular ones.
        if !inverse.iter().all(|v| v.is_finite()) || inverse.amax() * scale > 1e14 {
            return Err(singular());
        }
        Ok(MeanPreconditioner { inverse })
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    /// Mode-2 product of the first core with the inverse; ranks unchanged.
    pub fn apply(&self, v: &TtTensor) -> Result<TtTensor> {
        if v.dims()[0] != self.inverse.nrows() {
            return Err(TtError::DimensionMismatch(format!(
                "preconditioner acts on mode size {}, tensor has {}",
                self.inverse.nrows(),
                v.dims()[0]
            )));
        }
        let mut cores = v.cores().to_vec();
        cores[0] = cores[0].mul_mode(View::of(&self.inverse));
        Ok(TtTensor::from_cores_unchecked(cores))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::random_gaussian_tt;
    use crate::RankProfile;

    fn small_op() -> KroneckerSumOperator {
        let a = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                4.0
            } else {
                1.0 / (1 + i + j) as f64
            }
        });
        let b = Matrix::from_fn(4, 4, |i, j| (i as f64 - j as f64).cos());
        KroneckerSumOperator::new(vec![
            vec![
                ModeFactor::dense(&a),
                ModeFactor::Identity(4),
                ModeFactor::Diag(vec![1.0, 2.0]),
            ],
            vec![
                ModeFactor::Identity(3),
                ModeFactor::dense(&b),
                ModeFactor::Identity(2),
            ],
        ])
        .unwrap()
    }

    #[test]
    fn matches_dense_kronecker_sum() {
        let op = small_op();
        let x = random_gaussian_tt(&[3, 4, 2], &RankProfile::new(vec![2, 2]).unwrap(), 3).unwrap();
        let y = op.apply(&x).unwrap();
        assert_eq!(y.internal_ranks(), vec![4, 4]);
        let xv = nalgebra::DVector::from_vec(x.full().unwrap().data);
        let expected = op.to_dense() * xv;
        let got = y.full().unwrap().data;
        let diff: f64 = got
            .iter()
            .zip(expected.iter())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-12 * expected.norm());
    }

    #[test]
    fn identity_operator_and_preconditioner() {
        let op =
            KroneckerSumOperator::new(vec![vec![ModeFactor::Identity(3), ModeFactor::Identity(2)]])
                .unwrap();
        let x = random_gaussian_tt(&[3, 2], &RankProfile::new(vec![2]).unwrap(), 1).unwrap();
        assert!(op.apply(&x).unwrap().relative_error(&x).unwrap() <= 1e-13);
        let p = MeanPreconditioner::new(&op).unwrap();
        let px = p.apply(&x).unwrap();
        assert_eq!(px.ranks(), x.ranks());
        assert!(px.relative_error(&x).unwrap() <= 1e-13);
    }

    #[test]
    fn json_round_trip() {
        let op = small_op();
        let back = KroneckerSumOperator::from_json(&op.to_json().unwrap()).unwrap();
        assert_eq!(back.terms(), op.terms());
        let text = r#"{"terms": [[{"diag": [1, 2]}, {"identity": 3}], [{"dense": [[0, 1], [1, 0]]}, {"identity": 3}]]}"#;
        let op = KroneckerSumOperator::from_json(text).unwrap();
        assert_eq!(op.dims(), &[2, 3]);
    }

    #[test]
    fn rejects_inconsistent_terms() {
        assert!(KroneckerSumOperator::new(vec![]).is_err());
        assert!(
            KroneckerSumOperator::new(vec![vec![ModeFactor::Dense(vec![vec![1.0, 2.0]])]]).is_err()
        );
        assert!(KroneckerSumOperator::new(vec![
            vec![ModeFactor::Identity(2)],
            vec![ModeFactor::Identity(3)]
        ])
        .is_err());
        let singular = KroneckerSumOperator::new(vec![vec![ModeFactor::Dense(vec![
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        ])]])
        .unwrap();
        assert!(matches!(
            MeanPreconditioner::new(&singular),
            Err(TtError::SingularOperator(_))
        ));
    }
}
