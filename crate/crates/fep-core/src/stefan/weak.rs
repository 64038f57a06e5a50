//! Monotone explicit scheme for the weak solution.

use crate::stefan::{flux, DensityField, PdeError, SolverParams};

/// March `ρ_i ← ρ_i + (Δt/Δu²)(H(ρ_{i+1}) + H(ρ_{i-1}) - 2H(ρ_i))` on the
/// periodic grid, returning the fields at the requested snapshot times.
///
/// The scheme is monotone for `Δt ≤ Δu²/8` (the flux Lipschitz constant is
/// 4), keeps values in `[0,1]` and conserves mass up to rounding; all three
/// are enforced here.
pub fn solve_weak(rho0: &DensityField, params: &SolverParams) -> Result<Vec<DensityField>, PdeError> {
    params.validate()?;
    assert_eq!(rho0.m, params.m, "initial field must live on the solver grid");
    let m = params.m;
    let du2 = 1.0 / (m as f64 * m as f64);
    let dt_full = params.step_dt();

    let mut rho = rho0.values.clone();
    let mut w = vec![0.0; m];
    let mut time = 0.0f64;
    let mut out = Vec::with_capacity(params.snapshot_times.len());
    let mut snaps = params.snapshot_times.iter().copied().peekable();

    let mut emit_due = |time: f64, rho: &[f64], out: &mut Vec<DensityField>| {
        while let Some(&t) = snaps.peek() {
            if t <= time + 1e-15 {
                out.push(DensityField::new(rho.to_vec(), t));
                snaps.next();
            } else {
                break;
            }
        }
    };

    emit_due(time, &rho, &mut out);
    while time < params.t_end - 1e-15 {
        // land exactly on the next snapshot or the horizon
        let mut dt = dt_full.min(params.t_end - time);
        if let Some(&t) = params.snapshot_times.iter().find(|&&t| t > time + 1e-15) {
            dt = dt.min(t - time);
        }
        let lambda = dt / du2;
        for i in 0..m {
            w[i] = flux(rho[i]);
        }
        for i in 0..m {
            let left = w[if i == 0 { m - 1 } else { i - 1 }];
            let right = w[if i + 1 == m { 0 } else { i + 1 }];
            rho[i] += lambda * (left + right - 2.0 * w[i]);
            debug_assert!(
                (-1e-9..=1.0 + 1e-9).contains(&rho[i]),
                "maximum principle violated at cell {i}: {}",
                rho[i]
            );
        }
        time += dt;
        emit_due(time, &rho, &mut out);
    }
    emit_due(params.t_end, &rho, &mut out);
    Ok(out)
}
