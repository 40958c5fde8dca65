use serde::Serialize;

use super::DiskError;

pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochPoint {
    pub epoch: usize,
    pub rho_prime: f64,
    pub theta_prime: f64,
}

/// Disk coordinates of one word over cumulative epochs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub word: String,
    /// Strictly increasing epochs; epochs where the word was undefined are absent.
    pub points: Vec<EpochPoint>,
}

impl ConvergenceTrace {
    fn drift(&self, axis: fn(&EpochPoint) -> f64) -> Vec<f64> {
        self.points.windows(2).map(|w| (axis(&w[1]) - axis(&w[0])).abs()).collect()
    }

    pub fn drift_rho(&self) -> Vec<f64> {
        self.drift(|p| p.rho_prime)
    }

    pub fn drift_theta(&self) -> Vec<f64> {
        self.drift(|p| p.theta_prime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "epoch")]
pub enum AxisConvergence {
    /// Every drift from this epoch onward is below epsilon.
    Converged(usize),
    NotConverged,
}

impl AxisConvergence {
    pub fn epoch(self) -> Option<usize> {
        match self {
            AxisConvergence::Converged(e) => Some(e),
            AxisConvergence::NotConverged => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordConvergence {
    pub word: String,
    pub rho_prime: AxisConvergence,
    pub theta_prime: AxisConvergence,
    pub drift_rho: Vec<f64>,
    pub drift_theta: Vec<f64>,
}

/// Drift `i` belongs to the later epoch of its pair.
fn axis_convergence(points: &[EpochPoint], drift: &[f64], epsilon: f64) -> AxisConvergence {
    let tail = drift.iter().rev().take_while(|&&d| d < epsilon).count();
    if tail == 0 {
        AxisConvergence::NotConverged
    } else {
        AxisConvergence::Converged(points[drift.len() - tail + 1].epoch)
    }
}

pub fn convergence(
    traces: &[ConvergenceTrace],
    epsilon_rho: f64,
    epsilon_theta: f64,
) -> Result<Vec<WordConvergence>, DiskError> {
    traces
        .iter()
        .map(|t| {
            if t.points.len() < 2 {
                return Err(DiskError::TooFewEpochs {
                    word: t.word.clone(),
                    epochs: t.points.len(),
                });
            }
            let drift_rho = t.drift_rho();
            let drift_theta = t.drift_theta();
            Ok(WordConvergence {
                word: t.word.clone(),
                rho_prime: axis_convergence(&t.points, &drift_rho, epsilon_rho),
                theta_prime: axis_convergence(&t.points, &drift_theta, epsilon_theta),
                drift_rho,
                drift_theta,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(values: &[(f64, f64)]) -> ConvergenceTrace {
        ConvergenceTrace {
            word: "w".into(),
            points: values
                .iter()
                .enumerate()
                .map(|(epoch, &(r, t))| EpochPoint {
                    epoch,
                    rho_prime: r,
                    theta_prime: t,
                })
                .collect(),
        }
    }

    #[test]
    fn constant_converges_at_first_drift() {
        let c = convergence(&[trace(&[(0.2, 0.6); 4])], 0.01, 0.01).unwrap();
        assert_eq!(c[0].rho_prime, AxisConvergence::Converged(1));
        assert_eq!(c[0].theta_prime, AxisConvergence::Converged(1));
        assert_eq!(c[0].drift_rho.len(), 3);
    }

    #[test]
    fn steady_drift_never_converges() {
        let t = trace(&[(0.0, 0.0), (0.1, 0.0), (0.2, 0.0), (0.3, 0.0)]);
        let c = convergence(&[t], 0.01, 0.01).unwrap();
        assert_eq!(c[0].rho_prime, AxisConvergence::NotConverged);
        assert_eq!(c[0].theta_prime, AxisConvergence::Converged(1));
    }

    #[test]
    fn late_settling() {
        let t = trace(&[(0.0, 0.0), (0.5, 0.0), (0.52, 0.0), (0.521, 0.0), (0.5215, 0.0)]);
        let c = convergence(&[t], 0.01, 0.01).unwrap();
        assert_eq!(c[0].rho_prime, AxisConvergence::Converged(3));
        let c = convergence(&[trace(&[(0.0, 0.0), (0.5, 0.0), (0.52, 0.0), (0.521, 0.0), (0.5215, 0.0)])], 0.05, 0.01)
            .unwrap();
        assert_eq!(c[0].rho_prime, AxisConvergence::Converged(2));
    }

    #[test]
    fn needs_two_epochs() {
        assert!(matches!(
            convergence(&[trace(&[(0.1, 0.1)])], 0.01, 0.01),
            Err(DiskError::TooFewEpochs { epochs: 1, .. })
        ));
    }
}
