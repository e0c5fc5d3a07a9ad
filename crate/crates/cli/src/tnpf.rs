use nfpf_core::participation::{kernel, normalized_magnitudes, PointKind};
use nfpf_core::{
    convolve_at, decompose, linear_pf, pf_spectrum, Complex64, LoadedModel, ModalBasis,
    SecondOrderNF, TnpfConfig,
};
use rayon::prelude::*;

use crate::args::{Alpha, TimeGrid};
use crate::error::{CliError, CliResult};
use crate::output::{num, Blocks};

#[derive(Debug, Clone, Copy)]
pub enum ModeSelect {
    Frequency {
        hz: f64,
        tol: f64,
    },
    /// 1-based row of the mode table.
    Index(usize),
}

#[derive(Debug, Clone)]
pub struct TnpfOptions {
    pub mode: ModeSelect,
    pub times: TimeGrid,
    pub sigma: f64,
    pub alpha: Alpha,
    pub denom_tol: f64,
    pub include_dc: bool,
}

fn available(basis: &ModalBasis) -> String {
    basis
        .representatives()
        .map(|i| format!("mode{} {:.4} Hz", i + 1, basis.freq_hz(i)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn select_mode(basis: &ModalBasis, mode: ModeSelect) -> CliResult<usize> {
    match mode {
        ModeSelect::Index(i) => {
            if i == 0 || i > basis.n() {
                return Err(CliError::Input(format!(
                    "--mode-index {i} out of range 1..={}",
                    basis.n()
                )));
            }
            // report conjugates through their representative
            let i = i - 1;
            Ok(if basis.is_representative(i) {
                i
            } else {
                basis.pair_of(i)
            })
        }
        ModeSelect::Frequency { hz, tol } => basis
            .closest_mode(hz)
            .filter(|&i| (basis.freq_hz(i) - hz).abs() <= tol)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "no mode within {tol} Hz of {hz} Hz; available: {}",
                    available(basis)
                ))
            }),
    }
}

struct Row {
    raw: Vec<f64>,
    resonance: Vec<f64>,
    total: Vec<Complex64>,
}

pub fn tnpf(loaded: &LoadedModel, opts: &TnpfOptions) -> CliResult<String> {
    let model = loaded.quadratic();
    let n = model.n();
    let basis = decompose(model.a())?;
    let nf = SecondOrderNF::build(model, &basis, opts.denom_tol)?;
    let i = select_mode(&basis, opts.mode)?;
    let f = basis.freq_hz(i);
    let times = opts.times.points();
    let config = TnpfConfig {
        alpha: opts.alpha.resolve(n)?,
        sigma_hz: opts.sigma,
        time_grid: times.clone(),
        include_dc: opts.include_dc,
    };
    config.validate(n)?;

    let rows: Vec<Row> = times
        .par_iter()
        .map(|&t| -> CliResult<Row> {
            let mut row = Row {
                raw: vec![],
                resonance: vec![],
                total: vec![],
            };
            for k in 0..n {
                let mut s = pf_spectrum(&basis, &nf, &config, k, t)?;
                if !config.include_dc {
                    s = s.without_dc_resonances();
                }
                let raw = s
                    .linear_points()
                    .find(|pt| pt.source == nfpf_core::participation::PointSource::Mode(i))
                    .map(|pt| pt.amplitude.norm())
                    .unwrap_or(0.0);
                let res: Complex64 = s
                    .points
                    .iter()
                    .filter(|pt| pt.kind == PointKind::Resonance)
                    .map(|pt| pt.amplitude * kernel(f - pt.freq_hz, config.sigma_hz))
                    .sum();
                row.raw.push(raw);
                row.resonance.push(res.norm());
                row.total.push(convolve_at(&s, f, config.sigma_hz));
            }
            Ok(row)
        })
        .collect::<CliResult<_>>()?;

    let pl = linear_pf(&basis);
    let reference = normalized_magnitudes(&(0..n).map(|k| pl[(k, i)]).collect::<Vec<_>>());
    let labels = model.labels();
    let mut header = vec!["t".to_string()];
    for prefix in ["p2ki", "p2kpq", "tnpf", "normalized", "linear_ref"] {
        header.extend(labels.iter().map(|l| format!("{prefix}_{l}")));
    }
    let mut out = Blocks::new();
    out.block(&format!("tnpf mode{} {:.6} Hz", i + 1, f), &header);
    for (t, row) in times.iter().zip(&rows) {
        let normalized = if row.total.iter().all(|v| v.norm() == 0.0) {
            vec![0.0; n]
        } else {
            normalized_magnitudes(&row.total)
        };
        let mut cells = vec![num(*t)];
        cells.extend(row.raw.iter().map(|v| num(*v)));
        cells.extend(row.resonance.iter().map(|v| num(*v)));
        cells.extend(row.total.iter().map(|v| num(v.norm())));
        cells.extend(normalized.iter().map(|v| num(*v)));
        cells.extend(reference.iter().map(|v| num(*v)));
        out.row(&cells);
    }
    Ok(out.finish())
}
