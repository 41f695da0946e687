use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Divide the learning rate by `divisor` from `epoch` onwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrDrop {
    pub epoch: usize,
    pub divisor: f64,
}

/// Parses `EPOCH:DIVISOR`, e.g. `5:5`.
impl std::str::FromStr for LrDrop {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("lr_drops", format!("expected EPOCH:DIVISOR, got `{s}`"));
        let (e, d) = s.split_once(':').ok_or_else(bad)?;
        Ok(LrDrop {
            epoch: e.trim().parse().map_err(|_| bad())?,
            divisor: d.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Optimiser and schedule settings for one training phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub initial_lr: f64,
    pub momentum: f64,
    pub lr_drops: Vec<LrDrop>,
    pub batch_size: usize,
    /// Seed of the per-epoch shuffle stream.
    pub seed: u64,
}

impl TrainConfig {
    /// 10 epochs at 0.1, divided by 5 at epochs 5 and 8 (0.02, then 0.004).
    pub fn mnist(seed: u64) -> Self {
        Self {
            epochs: 10,
            initial_lr: 0.1,
            momentum: 0.9,
            lr_drops: vec![
                LrDrop {
                    epoch: 5,
                    divisor: 5.0,
                },
                LrDrop {
                    epoch: 8,
                    divisor: 5.0,
                },
            ],
            batch_size: 128,
            seed,
        }
    }

    /// 70 epochs at 2.0, divided by 5 at epochs 45, 60 and 68.
    pub fn cifar(seed: u64) -> Self {
        Self {
            epochs: 70,
            initial_lr: 2.0,
            momentum: 0.9,
            lr_drops: [45, 60, 68]
                .into_iter()
                .map(|epoch| LrDrop {
                    epoch,
                    divisor: 5.0,
                })
                .collect(),
            batch_size: 128,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::param("epochs", "must be >= 1"));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::param(
                "initial_lr",
                format!("must be > 0, got {}", self.initial_lr),
            ));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::param(
                "momentum",
                format!("must lie in [0, 1), got {}", self.momentum),
            ));
        }
        if self.batch_size == 0 {
            return Err(Error::param("batch_size", "must be >= 1"));
        }
        let mut prev = None;
        for d in &self.lr_drops {
            if prev.is_some_and(|p| d.epoch <= p) {
                return Err(Error::param(
                    "lr_drops",
                    "drop epochs must be strictly increasing",
                ));
            }
            if d.epoch >= self.epochs {
                return Err(Error::param(
                    "lr_drops",
                    format!("drop epoch {} is not below {} epochs", d.epoch, self.epochs),
                ));
            }
            if !(d.divisor > 1.0 && d.divisor.is_finite()) {
                return Err(Error::param(
                    "lr_drops",
                    format!("divisor must be > 1, got {}", d.divisor),
                ));
            }
            prev = Some(d.epoch);
        }
        Ok(())
    }

    /// Learning rate in effect during `epoch` (0-based).
    pub fn lr_at(&self, epoch: usize) -> f64 {
        self.lr_drops
            .iter()
            .filter(|d| d.epoch <= epoch)
            .fold(self.initial_lr, |lr, d| lr / d.divisor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_drops() {
        assert_eq!("8:2.5".parse::<LrDrop>().unwrap(), LrDrop { epoch: 8, divisor: 2.5 });
        for bad in ["8", "x:2", "8:", ""] {
            assert!(bad.parse::<LrDrop>().is_err(), "{bad}");
        }
    }

    #[test]
    fn mnist_schedule() {
        let cfg = TrainConfig::mnist(0);
        cfg.validate().unwrap();
        assert_eq!(cfg.lr_at(4), 0.1);
        assert!((cfg.lr_at(5) - 0.02).abs() < 1e-15);
        assert!((cfg.lr_at(7) - 0.02).abs() < 1e-15);
        assert!((cfg.lr_at(8) - 0.004).abs() < 1e-15);
    }

    #[test]
    fn cifar_schedule() {
        let cfg = TrainConfig::cifar(0);
        cfg.validate().unwrap();
        assert_eq!(cfg.lr_at(44), 2.0);
        assert!((cfg.lr_at(68) - 2.0 / 125.0).abs() < 1e-15);
    }

    #[test]
    fn no_drops_is_constant() {
        let cfg = TrainConfig {
            lr_drops: vec![],
            ..TrainConfig::mnist(0)
        };
        assert!((0..10).all(|e| cfg.lr_at(e) == 0.1));
    }

    #[test]
    fn validation_rejects_bad_drops() {
        let base = TrainConfig::mnist(0);
        let drops = |v: Vec<(usize, f64)>| TrainConfig {
            lr_drops: v
                .into_iter()
                .map(|(epoch, divisor)| LrDrop { epoch, divisor })
                .collect(),
            ..base.clone()
        };
        assert!(drops(vec![(5, 5.0), (5, 5.0)]).validate().is_err());
        assert!(drops(vec![(8, 5.0), (5, 5.0)]).validate().is_err());
        assert!(drops(vec![(10, 5.0)]).validate().is_err());
        assert!(drops(vec![(3, 1.0)]).validate().is_err());
        assert!(TrainConfig { momentum: 1.0, ..base.clone() }.validate().is_err());
        assert!(TrainConfig { initial_lr: 0.0, ..base }.validate().is_err());
    }
}
