use nfpf_core::participation::{PointKind, PointSource};
use nfpf_core::{convolve_at, decompose, pf_spectrum, LoadedModel, SecondOrderNF, TnpfConfig};

use crate::args::{state_index, Alpha, Grid};
use crate::error::CliResult;
use crate::output::{header, num, Blocks};

#[derive(Debug, Clone)]
pub struct SpectrumOptions {
    /// 1-based.
    pub state: usize,
    pub time: f64,
    pub sigma: f64,
    pub grid: Grid,
    pub alpha: Alpha,
    pub denom_tol: f64,
    pub include_dc: bool,
}

pub fn spectrum(loaded: &LoadedModel, opts: &SpectrumOptions) -> CliResult<String> {
    let model = loaded.quadratic();
    let n = model.n();
    let k = state_index(opts.state, n)?;
    let basis = decompose(model.a())?;
    let nf = SecondOrderNF::build(model, &basis, opts.denom_tol)?;
    let config = TnpfConfig {
        alpha: opts.alpha.resolve(n)?,
        sigma_hz: opts.sigma,
        time_grid: vec![opts.time],
        include_dc: opts.include_dc,
    };
    config.validate(n)?;
    let s = pf_spectrum(&basis, &nf, &config, k, opts.time)?;

    let mut out = Blocks::new();
    out.block(
        "points",
        &header(&["freq_hz", "abs_amplitude", "kind", "source"]),
    );
    for pt in &s.points {
        let kind = match pt.kind {
            PointKind::Linear => "linear",
            PointKind::Resonance => "resonance",
        };
        let source = match pt.source {
            PointSource::Mode(i) => format!("mode:{}", i + 1),
            PointSource::Pair(p, q) => format!("pair:{}+{}", p + 1, q + 1),
        };
        out.row(&[
            num(pt.freq_hz),
            num(pt.amplitude.norm()),
            kind.into(),
            source,
        ]);
    }
    let curve_source = if opts.include_dc {
        s
    } else {
        s.without_dc_resonances()
    };
    out.block("curve", &header(&["freq_hz", "abs_p2"]));
    for f in opts.grid.points() {
        out.row(&[
            num(f),
            num(convolve_at(&curve_source, f, opts.sigma).norm()),
        ]);
    }
    Ok(out.finish())
}
