//! Payoff streams: four nonstationary saddle trajectories, a stationary
//! stream, an adaptive adversary whose NE regret cancels, and a user-supplied
//! cycle of saddles.

use std::f64::consts::{E, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algorithms::StrategyPair;
use crate::error::{Error, Result};
use crate::geometry::BoxSet;
use crate::payoffs::{QuadraticSaddle, SeparableSaddle, SharedPayoff};

pub fn z1(t: f64) -> f64 {
    (1.0 + t).ln()
}

pub fn z2(t: f64) -> f64 {
    (E + t).ln().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    Case1,
    Case2,
    Case3,
    Case4,
    Stationary,
    NeregCancel,
    Custom,
}

impl EnvironmentKind {
    pub const ALL: [EnvironmentKind; 7] = [
        Self::Case1,
        Self::Case2,
        Self::Case3,
        Self::Case4,
        Self::Stationary,
        Self::NeregCancel,
        Self::Custom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Case1 => "case1",
            Self::Case2 => "case2",
            Self::Case3 => "case3",
            Self::Case4 => "case4",
            Self::Stationary => "stationary",
            Self::NeregCancel => "nereg_cancel",
            Self::Custom => "custom",
        }
    }

    /// Whether the stream reacts to the pair the players commit.
    pub fn is_adaptive(&self) -> bool {
        matches!(self, Self::Case4 | Self::NeregCancel)
    }
}

impl fmt::Display for EnvironmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnvironmentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown environment `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub kind: EnvironmentKind,
    /// Saddle of the `stationary` stream; defaults to `(1, 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary_saddle: Option<(f64, f64)>,
    /// Saddles cycled by the `custom` stream.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub saddles: Vec<(f64, f64)>,
}

impl EnvironmentSpec {
    pub fn new(kind: EnvironmentKind) -> Self {
        Self { kind, stationary_saddle: None, saddles: Vec::new() }
    }

    pub fn stationary(a: f64, b: f64) -> Self {
        Self { kind: EnvironmentKind::Stationary, stationary_saddle: Some((a, b)), saddles: Vec::new() }
    }

    pub fn custom(saddles: Vec<(f64, f64)>) -> Self {
        Self { kind: EnvironmentKind::Custom, stationary_saddle: None, saddles }
    }

    /// Half-width of the square feasible set.
    pub fn radius(&self) -> f64 {
        match self.kind {
            EnvironmentKind::NeregCancel => 1.0,
            _ => 4.0,
        }
    }

    pub fn box_x(&self) -> BoxSet {
        BoxSet::interval(-self.radius(), self.radius()).expect("fixed finite bounds")
    }

    pub fn box_y(&self) -> BoxSet {
        self.box_x()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.radius();
        let check = |(a, b): (f64, f64)| {
            if a.abs() <= r && b.abs() <= r {
                Ok(())
            } else {
                Err(Error::Config(format!("saddle ({a}, {b}) lies outside [-{r}, {r}]^2")))
            }
        };
        match self.kind {
            EnvironmentKind::Stationary => check(self.stationary_saddle.unwrap_or((1.0, 1.0))),
            EnvironmentKind::Custom => {
                if self.saddles.is_empty() {
                    return Err(Error::Config("custom environment needs at least one saddle".into()));
                }
                self.saddles.iter().copied().try_for_each(check)
            }
            _ => Ok(()),
        }
    }

    /// Saddle of round `t >= 1`. `last_pair` is the pair committed this round.
    pub fn saddle(&self, t: u64, last_pair: &StrategyPair) -> (f64, f64) {
        let tf = t as f64;
        let polar = |r: f64, theta: f64| (r * theta.cos(), r * theta.sin());
        match self.kind {
            EnvironmentKind::Case1 => polar(z2(tf), z1(tf)),
            EnvironmentKind::Case2 => polar(z2(tf), PI * tf + z2(tf)),
            EnvironmentKind::Case3 => polar(z2(tf), 2.0 * PI * tf / 3.0 + z2(tf)),
            EnvironmentKind::Case4 => {
                let (x, y) = (last_pair.x[0], last_pair.y[0]);
                let arg = if x == 0.0 && y == 0.0 { 0.0 } else { y.atan2(x) };
                polar(SQRT_2, 8.0 * PI / 9.0 + arg)
            }
            EnvironmentKind::Stationary => self.stationary_saddle.unwrap_or((1.0, 1.0)),
            EnvironmentKind::NeregCancel => {
                let (x, y) = (last_pair.x[0], last_pair.y[0]);
                let sign = if t.is_multiple_of(2) { 1.0 } else { -1.0 };
                let toward = |v: f64| if v < 0.0 { 1.0 } else { -1.0 };
                (x + (sign + 1.0) / 2.0 * toward(x), y - (sign - 1.0) / 2.0 * toward(y))
            }
            EnvironmentKind::Custom => self.saddles[((t - 1) % self.saddles.len() as u64) as usize],
        }
    }

    /// Payoff revealed at round `t` after the players committed `last_pair`.
    pub fn next_payoff(&self, t: u64, last_pair: &StrategyPair) -> Result<SharedPayoff> {
        let (a, b) = self.saddle(t, last_pair);
        let r = self.radius();
        if !(a.abs() <= r && b.abs() <= r) {
            return Err(Error::InvariantBreach {
                invariant: "saddle-in-box".into(),
                round: t,
                detail: format!("{} produced saddle ({a}, {b})", self.kind),
            });
        }
        Ok(match self.kind {
            EnvironmentKind::NeregCancel => Arc::new(SeparableSaddle::new(a, b)),
            _ => Arc::new(QuadraticSaddle::new(a, b)),
        })
    }

    /// Per-round max-min value; every shipped stream has interior saddles of value zero.
    pub fn nash_value(&self, _t: u64) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::rho_distance;

    fn pair(x: f64, y: f64) -> StrategyPair {
        StrategyPair { x: vec![x], y: vec![y] }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn z_functions() {
        assert_eq!(z1(0.0), 0.0);
        assert_eq!(z2(0.0), 0.0);
        assert!(close(z1(1.0), std::f64::consts::LN_2, 1e-12));
        assert!(close(z2(1.0), 0.2725139, 1e-7));
        assert!(z2(1e5) < 2.45);
    }

    #[test]
    fn case1_first_saddle() {
        let (a, b) = EnvironmentSpec::new(EnvironmentKind::Case1).saddle(1, &pair(0.0, 0.0));
        assert!(close(a, 0.2096283, 1e-7) && close(b, 0.1741258, 1e-7), "{a} {b}");
    }

    #[test]
    fn case4_rotates_played_pair() {
        let env = EnvironmentSpec::new(EnvironmentKind::Case4);
        let (a, b) = env.saddle(7, &pair(1.0, 0.0));
        assert!(close(a, -1.328926, 1e-6) && close(b, 0.483690, 1e-6));
        for p in [pair(0.0, 0.0), pair(-3.0, 2.0), pair(0.1, -4.0)] {
            let (a, b) = env.saddle(3, &p);
            assert!(close(a.hypot(b), SQRT_2, 1e-12));
        }
    }

    #[test]
    fn nereg_cancel_alternates() {
        let env = EnvironmentSpec::new(EnvironmentKind::NeregCancel);
        assert_eq!(env.saddle(2, &pair(0.5, -0.5)), (-0.5, -0.5));
        let f = env.next_payoff(2, &pair(0.5, -0.5)).unwrap();
        assert_eq!(f.value(&[0.5], &[-0.5]), 1.0);
        let grid = [-1.0, -0.6, -0.25, 0.0, 0.3, 0.99, 1.0];
        for t in 1..=6u64 {
            for &x in &grid {
                for &y in &grid {
                    let p = pair(x, y);
                    let f = env.next_payoff(t, &p).unwrap();
                    let expect = if t % 2 == 0 { 1.0 } else { -1.0 };
                    assert_eq!(f.value(&p.x, &p.y), expect);
                    let (a, b) = env.saddle(t, &p);
                    assert!(a.abs() <= 1.0 && b.abs() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn oblivious_streams_ignore_pair() {
        for kind in [EnvironmentKind::Case1, EnvironmentKind::Case2, EnvironmentKind::Case3, EnvironmentKind::Stationary] {
            let env = EnvironmentSpec::new(kind);
            for t in [1, 2, 17, 1000] {
                assert_eq!(env.saddle(t, &pair(0.0, 0.0)), env.saddle(t, &pair(3.0, -2.0)));
            }
        }
    }

    #[test]
    fn periodic_variability_vanishes() {
        let b = BoxSet::interval(-4.0, 4.0).unwrap();
        let origin = pair(0.0, 0.0);
        for (kind, lag) in [(EnvironmentKind::Case1, 1), (EnvironmentKind::Case2, 2), (EnvironmentKind::Case3, 3)] {
            let env = EnvironmentSpec::new(kind);
            let rho = |t: u64| {
                let f = env.next_payoff(t, &origin).unwrap();
                let g = env.next_payoff(t - lag, &origin).unwrap();
                rho_distance(f.as_ref(), g.as_ref(), &b, &b).unwrap()
            };
            assert!(rho(10_000) < rho(100), "{kind}");
        }
    }

    #[test]
    fn custom_cycles_and_validates() {
        let env = EnvironmentSpec::custom(vec![(1.0, 0.0), (0.0, 2.0)]);
        env.validate().unwrap();
        assert_eq!(env.saddle(1, &pair(0.0, 0.0)), (1.0, 0.0));
        assert_eq!(env.saddle(2, &pair(0.0, 0.0)), (0.0, 2.0));
        assert_eq!(env.saddle(3, &pair(0.0, 0.0)), (1.0, 0.0));
        assert!(EnvironmentSpec::custom(vec![]).validate().is_err());
        assert!(EnvironmentSpec::custom(vec![(5.0, 0.0)]).validate().is_err());
        let bad = EnvironmentSpec::custom(vec![(5.0, 0.0)]);
        assert!(matches!(bad.next_payoff(1, &pair(0.0, 0.0)), Err(Error::InvariantBreach { .. })));
    }

    #[test]
    fn nash_value_zero() {
        for kind in EnvironmentKind::ALL {
            assert_eq!(EnvironmentSpec::new(kind).nash_value(5), 0.0);
        }
    }

    #[test]
    fn kind_names_roundtrip() {
        for kind in EnvironmentKind::ALL {
            assert_eq!(kind.as_str().parse::<EnvironmentKind>().unwrap(), kind);
            assert_eq!(serde_json::to_string(&kind).unwrap(), format!("\"{kind}\""));
        }
    }
}
