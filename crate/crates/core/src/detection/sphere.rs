use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::sync::Arc;

use super::{checked_inverse, DemodObservation, PIVOT_TOLERANCE};
use crate::error::{Result, WdsError};
use crate::waveform::Constellation;

/// Node evaluations allowed per decode before the search gives up.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

/// Everything about `C` a sphere decoder needs, computed once per matrix.
#[derive(Debug, Clone)]
pub struct SdFactor {
    corr: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
    upper: DMatrix<Complex64>,
    // upper[(i, j)] / upper[(i, i)], used to form each level's search centre.
    ratio: DMatrix<Complex64>,
    diag_sq: Vec<f64>,
}

impl SdFactor {
    pub fn new(corr: &DMatrix<Complex64>) -> Result<Self> {
        let n = corr.nrows();
        if corr.ncols() != n {
            return Err(WdsError::LengthMismatch {
                expected: n,
                actual: corr.ncols(),
            });
        }
        let gram = corr.adjoint() * corr;
        let upper = cholesky_upper(&gram)?;
        let inverse = checked_inverse(corr)?;
        let diag_sq: Vec<f64> = (0..n).map(|i| upper[(i, i)].norm_sqr()).collect();
        let ratio = DMatrix::from_fn(n, n, |i, j| {
            if j > i {
                upper[(i, j)] / upper[(i, i)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(SdFactor {
            corr: corr.clone(),
            inverse,
            upper,
            ratio,
            diag_sq,
        })
    }

    pub fn dim(&self) -> usize {
        self.corr.nrows()
    }

    /// Upper-triangular `L` with `L^H L = C^H C`.
    pub fn chol_upper(&self) -> &DMatrix<Complex64> {
        &self.upper
    }

    pub fn corr(&self) -> &DMatrix<Complex64> {
        &self.corr
    }

    /// `p = C⁻¹ r`.
    pub fn soft(&self, r: &[Complex64]) -> Vec<Complex64> {
        (&self.inverse * DVector::from_column_slice(r)).as_slice().to_vec()
    }

    /// `‖L(p − s)‖²`, accumulated level by level exactly as the search does.
    pub fn tree_metric(&self, p: &[Complex64], s: &[Complex64]) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for i in (0..n).rev() {
            let mut c = p[i];
            for j in i + 1..n {
                c += self.ratio[(i, j)] * (p[j] - s[j]);
            }
            total += self.diag_sq[i] * (c - s[i]).norm_sqr();
        }
        total
    }

    /// Convenience: workspace with the ZF radius, then search.
    pub fn decode(self: &Arc<Self>, r: &[Complex64]) -> Result<DetectionResult> {
        let mut ws = SdWorkspace::with_factor(Arc::clone(self), r)?;
        ws.search()
    }
}

/// `A = U^H U` for Hermitian positive-definite `A`.
fn cholesky_upper(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let mut u = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let mut d = a[(i, i)].re;
        for k in 0..i {
            d -= u[(k, i)].norm_sqr();
        }
        if !(d >= PIVOT_TOLERANCE) {
            return Err(WdsError::SingularCorrelation {
                pivot: d,
                tolerance: PIVOT_TOLERANCE,
            });
        }
        let uii = d.sqrt();
        u[(i, i)] = Complex64::new(uii, 0.0);
        for j in i + 1..n {
            let mut v = a[(i, j)];
            for k in 0..i {
                v -= u[(k, i)].conj() * u[(k, j)];
            }
            u[(i, j)] = v / uii;
        }
    }
    Ok(u)
}

/// Search state for one observation: factor, soft estimate `p` and radius `g`.
#[derive(Debug, Clone)]
pub struct SdWorkspace {
    factor: Arc<SdFactor>,
    pub soft: Vec<Complex64>,
    pub radius: f64,
    pub node_budget: u64,
    zf: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub symbols: Vec<Complex64>,
    pub visited_nodes: u64,
    /// The search completed and returned the best lattice point inside the radius.
    pub found: bool,
    /// `‖r − C s‖²` of the returned symbols under the detector's matrix.
    pub metric: f64,
    /// Sub-bands whose search failed and fell back to zero forcing.
    pub erasures: usize,
}

impl SdWorkspace {
    pub fn new(obs: &DemodObservation) -> Result<Self> {
        let factor = Arc::new(SdFactor::new(&obs.corr.entries)?);
        Self::with_factor(factor, &obs.r)
    }

    /// Radius initialised to the zero-forcing point's metric, so that point is
    /// always inside the sphere.
    pub fn with_factor(factor: Arc<SdFactor>, r: &[Complex64]) -> Result<Self> {
        if r.len() != factor.dim() {
            return Err(WdsError::LengthMismatch {
                expected: factor.dim(),
                actual: r.len(),
            });
        }
        let soft = factor.soft(r);
        let q = Constellation::Qpsk;
        let zf: Vec<usize> = soft.iter().map(|&z| q.decide_index(z)).collect();
        let s_zf: Vec<Complex64> = zf.iter().map(|&i| q.point(i)).collect();
        let direct = super::residual(&factor.corr, r, &s_zf);
        let tree = factor.tree_metric(&soft, &s_zf);
        // Both evaluations agree up to round-off; pad so the ZF leaf never falls outside.
        let radius = direct.max(tree) * (1.0 + 1e-9) + 1e-300;
        Ok(SdWorkspace {
            factor,
            soft,
            radius,
            node_budget: DEFAULT_NODE_BUDGET,
            zf,
        })
    }

    pub fn chol_upper(&self) -> &DMatrix<Complex64> {
        self.factor.chol_upper()
    }

    pub fn factor(&self) -> &Arc<SdFactor> {
        &self.factor
    }

    /// Depth-first search from the last dimension down, children in
    /// Schnorr–Euchner order, shrinking the radius at every leaf.
    pub fn search(&mut self) -> Result<DetectionResult> {
        let f = &*self.factor;
        let n = f.dim();
        let q = Constellation::Qpsk;
        let points = q.points();
        let p = &self.soft;
        let mut radius = self.radius;

        let mut idx = vec![0usize; n];
        let mut sym = vec![Complex64::new(0.0, 0.0); n];
        let mut partial = vec![0.0f64; n + 1];
        let mut centre = vec![Complex64::new(0.0, 0.0); n];
        let mut order = vec![[0usize; 4]; n];
        let mut pos = vec![0usize; n];
        let mut best: Option<(Vec<usize>, f64)> = None;
        let mut visited = 0u64;
        let mut truncated = false;

        let enter = |k: usize, sym: &[Complex64], centre: &mut [Complex64], order: &mut [[usize; 4]]| {
            let mut c = p[k];
            for j in k + 1..n {
                c += f.ratio[(k, j)] * (p[j] - sym[j]);
            }
            centre[k] = c;
            let mut o = [0usize, 1, 2, 3];
            let d: [f64; 4] = std::array::from_fn(|i| (c - points[i]).norm_sqr());
            // Stable sort keeps the lower index first on equal distance.
            o.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
            order[k] = o;
        };

        if n == 0 {
            return Ok(DetectionResult {
                symbols: Vec::new(),
                visited_nodes: 0,
                found: true,
                metric: 0.0,
                erasures: 0,
            });
        }

        let mut k = n - 1;
        enter(k, &sym, &mut centre, &mut order);
        pos[k] = 0;
        loop {
            if pos[k] == 4 {
                k += 1;
                if k == n {
                    break;
                }
                pos[k] += 1;
                continue;
            }
            if visited >= self.node_budget {
                truncated = true;
                break;
            }
            visited += 1;
            let i = order[k][pos[k]];
            let m = partial[k + 1] + f.diag_sq[k] * (centre[k] - points[i]).norm_sqr();
            if m > radius {
                // Remaining siblings are no closer.
                pos[k] = 4;
                continue;
            }
            debug_assert!(m >= partial[k + 1] && m <= radius);
            idx[k] = i;
            sym[k] = points[i];
            partial[k] = m;
            if k == 0 {
                let better = match &best {
                    None => true,
                    Some((b, bm)) => m < *bm || (m == *bm && idx < *b),
                };
                if better {
                    best = Some((idx.clone(), m));
                    radius = m;
                }
                pos[0] += 1;
            } else {
                k -= 1;
                enter(k, &sym, &mut centre, &mut order);
                pos[k] = 0;
            }
        }
        self.radius = radius;

        let (indices, found) = match best {
            Some((b, _)) => (b, !truncated),
            None if truncated => (self.zf.clone(), false),
            None => return Err(WdsError::NoSolution { radius: self.radius }),
        };
        let symbols: Vec<Complex64> = indices.iter().map(|&i| q.point(i)).collect();
        let metric = f.tree_metric(p, &symbols);
        Ok(DetectionResult {
            symbols,
            visited_nodes: visited,
            found,
            metric,
            erasures: usize::from(!found),
        })
    }
}

/// Sphere decoding of `obs` with a prepared workspace.
pub fn sphere_decode(obs: &DemodObservation, workspace: &mut SdWorkspace) -> Result<DetectionResult> {
    if obs.dim() != workspace.factor.dim() {
        return Err(WdsError::LengthMismatch {
            expected: workspace.factor.dim(),
            actual: obs.dim(),
        });
    }
    workspace.search()
}
