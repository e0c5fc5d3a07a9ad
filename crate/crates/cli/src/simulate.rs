use nfpf_core::{
    decompose, integrate, invert_initial_condition, reconstruct_response, reconstruction_error,
    LoadedModel, SecondOrderNF,
};

use crate::args::InitialState;
use crate::error::{CliError, CliResult};
use crate::output::{header, num, Blocks};

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub x0: InitialState,
    pub dt: f64,
    pub t_end: f64,
    pub denom_tol: f64,
    /// Integrate the trigonometric swing field instead of its quadratic truncation.
    pub full: bool,
}

pub fn simulate(loaded: &LoadedModel, opts: &SimulateOptions) -> CliResult<String> {
    let model = loaded.quadratic();
    let n = model.n();
    let x0 = opts.x0.resolve(n)?;
    if !(opts.dt > 0.0 && opts.t_end > 0.0) {
        return Err(CliError::Input("--dt and --t-end must be positive".into()));
    }
    let basis = decompose(model.a())?;
    let nf = SecondOrderNF::build(model, &basis, opts.denom_tol)?;

    let (times, states, gaps, self_check, warnings) = if opts.full {
        let sys = loaded
            .swing()
            .ok_or_else(|| CliError::Input("--full needs a swing model".into()))?;
        let start: Vec<f64> = model.x_eq().iter().zip(&x0).map(|(e, d)| e + d).collect();
        let traj = integrate(sys, &start, opts.dt, opts.t_end)?;
        let z0 = invert_initial_condition(&basis, &nf, &x0)?;
        let rebuilt = reconstruct_response(&basis, &nf, &z0, &traj.times)?;
        let mut states = traj.states.clone();
        for j in 0..traj.times.len() {
            for k in 0..n {
                states[(k, j)] -= model.x_eq()[k];
            }
        }
        let gaps = (0..traj.times.len())
            .map(|j| (states.column(j) - rebuilt.states.column(j)).amax())
            .collect::<Vec<f64>>();
        (traj.times, states, gaps, traj.self_check, traj.warnings)
    } else {
        let report = reconstruction_error(model, &basis, &nf, &x0, opts.dt, opts.t_end)?;
        let tr = report.trajectory;
        (
            tr.times,
            tr.states,
            report.gap_curve,
            tr.self_check,
            tr.warnings,
        )
    };

    let mut out = Blocks::new();
    let mut h = vec!["t".to_string()];
    h.extend(model.labels().iter().cloned());
    h.push("gap".into());
    out.block("trajectory", &h);
    for (j, t) in times.iter().enumerate() {
        let mut cells = vec![num(*t)];
        cells.extend((0..n).map(|k| num(states[(k, j)])));
        cells.push(num(gaps[j]));
        out.row(&cells);
    }
    let (jmax, max_gap) =
        gaps.iter().copied().enumerate().fold(
            (0, 0.0),
            |best, (j, g)| if g > best.1 { (j, g) } else { best },
        );
    out.block("gap", &header(&["max_gap", "t_at_max", "self_check"]));
    out.row(&[num(max_gap), num(times[jmax]), num(self_check)]);
    out.block("warnings", &header(&["stage", "message"]));
    for w in warnings {
        out.row(&["simkit".into(), format!("\"{w}\"")]);
    }
    Ok(out.finish())
}
