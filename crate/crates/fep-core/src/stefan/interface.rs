//! Interface extraction from density fields.

use serde::{Deserialize, Serialize};

use crate::stefan::{DensityField, PdeError};

/// Front positions at one time.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InterfaceState {
    pub time: f64,
    /// Left end of the subcritical arc (non-decreasing in time).
    pub u_minus: f64,
    /// Right end of the subcritical arc (non-increasing in time).
    pub u_plus: f64,
    pub merged: bool,
}

/// Interface positions along a solve.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct InterfaceTrajectory {
    pub states: Vec<InterfaceState>,
    /// First time with no subcritical arc, if observed.
    pub merge_time: Option<f64>,
}

impl InterfaceTrajectory {
    /// Linear interpolation of the front positions at `t` (clamped to the
    /// recorded range). Positions are interpolated in the unwrapped
    /// coordinates used during tracking, so wrap-through-zero is safe.
    pub fn at(&self, t: f64) -> Option<InterfaceState> {
        if self.states.is_empty() {
            return None;
        }
        if t <= self.states[0].time {
            return Some(self.states[0]);
        }
        if t >= self.states.last().unwrap().time {
            return Some(*self.states.last().unwrap());
        }
        let i = self.states.partition_point(|s| s.time < t);
        let (a, b) = (&self.states[i - 1], &self.states[i]);
        let lam = (t - a.time) / (b.time - a.time);
        // interpolate along the shorter torus arc between the two samples
        let lerp = |x: f64, y: f64| {
            let mut d = (y - x).rem_euclid(1.0);
            if d > 0.5 {
                d -= 1.0;
            }
            (x + lam * d).rem_euclid(1.0)
        };
        Some(InterfaceState {
            time: t,
            u_minus: lerp(a.u_minus, b.u_minus),
            u_plus: lerp(a.u_plus, b.u_plus),
            merged: a.merged,
        })
    }
}

/// Extract the subcritical arc `{ρ < 1/2 - ε}` from each field.
///
/// The endpoints are refined to sub-grid resolution by interpolating the
/// 1/2-crossing against the neighboring supercritical cell; the reported
/// `u_minus` never decreases and `u_plus` never increases (tracking in
/// unwrapped coordinates). Merge is declared at the first field with no
/// subcritical cell; fronts are held constant afterwards. A field with
/// several subcritical arcs is an error (the single-arc front geometry is
/// an input assumption, not something the extractor can repair).
pub fn extract_interfaces(
    fields: &[DensityField],
    eps: f64,
) -> Result<InterfaceTrajectory, PdeError> {
    if fields.is_empty() || fields.windows(2).any(|w| w[0].time > w[1].time) {
        return Err(PdeError::BadFieldList);
    }
    let mut out = InterfaceTrajectory::default();
    // unwrapped trackers
    let mut track: Option<(f64, f64)> = None;
    let mut merged = false;
    let mut held = (f64::NAN, f64::NAN);

    for f in fields {
        let m = f.m;
        let du = 1.0 / m as f64;
        let level = 0.5 - eps;
        let sub: Vec<bool> = f.values.iter().map(|&v| v < level).collect();
        let count = sub.iter().filter(|&&s| s).count();

        if merged {
            out.states.push(InterfaceState {
                time: f.time,
                u_minus: held.0,
                u_plus: held.1,
                merged: true,
            });
            continue;
        }

        if count == 0 {
            merged = true;
            out.merge_time = Some(f.time);
            let (um, up) = track.map_or((0.0, 0.0), |(a, b)| {
                let mid = 0.5 * (a + b);
                (mid.rem_euclid(1.0), mid.rem_euclid(1.0))
            });
            held = (um, up);
            out.states.push(InterfaceState { time: f.time, u_minus: um, u_plus: up, merged: true });
            continue;
        }
        if count == m {
            return Err(PdeError::EntirelySubcritical(f.time));
        }
        // circular runs of subcritical cells
        let mut starts = Vec::new();
        for i in 0..m {
            if sub[i] && !sub[(i + m - 1) % m] {
                starts.push(i);
            }
        }
        if starts.len() != 1 {
            return Err(PdeError::MultipleSubcriticalArcs { time: f.time, count: starts.len() });
        }
        let start = starts[0];
        let mut len = 1usize;
        while sub[(start + len) % m] {
            len += 1;
        }
        let end = (start + len - 1) % m; // last subcritical cell

        // refine by interpolating the 1/2-crossing toward the
        // supercritical neighbor
        let refine = |inside: usize, outside: usize, dir: f64| -> f64 {
            let vi = f.values[inside];
            let vo = f.values[outside];
            let base = inside as f64 * du;
            if vo >= 0.5 {
                let t = (0.5 - vi) / (vo - vi);
                (base + dir * t * du).rem_euclid(1.0)
            } else {
                (base + dir * 0.5 * du).rem_euclid(1.0)
            }
        };
        let um = refine(start, (start + m - 1) % m, -1.0);
        let up = refine(end, (end + 1) % m, 1.0);

        // enforce monotone fronts in unwrapped coordinates
        let (um_u, up_u) = match track {
            None => {
                // unwrap so that um ≤ up within one period
                let up_u = if up >= um { up } else { up + 1.0 };
                (um, up_u)
            }
            Some((prev_um, prev_up)) => {
                // representative of the torus position closest to the
                // previous unwrapped value
                let lift = |x: f64, near: f64| x + (near - x).round();
                let um_l = lift(um, prev_um).max(prev_um);
                let up_l = lift(up, prev_up).min(prev_up);
                (um_l, up_l)
            }
        };
        track = Some((um_u, up_u));
        out.states.push(InterfaceState {
            time: f.time,
            u_minus: um_u.rem_euclid(1.0),
            u_plus: up_u.rem_euclid(1.0),
            merged: false,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::ProfileSpec;

    #[test]
    fn supercritical_field_is_merged_immediately() {
        let f = DensityField::constant(64, 0.8, 0.0);
        let traj = extract_interfaces(&[f], 1e-3).unwrap();
        assert_eq!(traj.merge_time, Some(0.0));
        assert!(traj.states[0].merged);
    }

    #[test]
    fn reference_profile_initial_arc() {
        let f = DensityField::from_profile(&ProfileSpec::reference(), 512);
        let traj = extract_interfaces(&[f], 1e-3).unwrap();
        let s = &traj.states[0];
        assert!(!s.merged);
        let du = 1.0 / 512.0;
        assert!(s.u_minus.min(1.0 - s.u_minus) < 3.0 * du, "u_minus {}", s.u_minus);
        assert!((s.u_plus - 0.5).abs() < 3.0 * du, "u_plus {}", s.u_plus);
    }

    #[test]
    fn entirely_subcritical_is_an_error() {
        let f = DensityField::constant(64, 0.3, 0.0);
        assert!(matches!(
            extract_interfaces(&[f], 1e-3),
            Err(PdeError::EntirelySubcritical(_))
        ));
    }

    #[test]
    fn multiple_arcs_are_an_error() {
        let mut values = vec![0.7; 64];
        for i in 10..15 {
            values[i] = 0.3;
        }
        for i in 40..45 {
            values[i] = 0.3;
        }
        let f = DensityField::new(values, 0.0);
        assert!(matches!(
            extract_interfaces(&[f], 1e-3),
            Err(PdeError::MultipleSubcriticalArcs { count: 2, .. })
        ));
    }

    #[test]
    fn fronts_are_monotone_and_hold_after_merge() {
        // synthetic shrinking arc then merged
        let mk = |lo: usize, hi: usize, t: f64| {
            let mut v = vec![0.8; 100];
            for i in lo..hi {
                v[i] = 0.2;
            }
            DensityField::new(v, t)
        };
        let fields = vec![mk(10, 30, 0.0), mk(12, 28, 1.0), mk(15, 20, 2.0), {
            let v = vec![0.8; 100];
            DensityField::new(v, 3.0)
        }];
        let traj = extract_interfaces(&fields, 1e-3).unwrap();
        assert_eq!(traj.merge_time, Some(3.0));
        for w in traj.states.windows(2) {
            if !w[1].merged {
                assert!(w[1].u_minus >= w[0].u_minus - 1e-12);
                assert!(w[1].u_plus <= w[0].u_plus + 1e-12);
            }
        }
        let last = traj.states.last().unwrap();
        assert!(last.merged);
        // at() interpolates and clamps
        assert!(traj.at(-1.0).unwrap().time == 0.0);
        assert!(traj.at(0.5).unwrap().u_minus >= traj.at(0.0).unwrap().u_minus);
    }
}
