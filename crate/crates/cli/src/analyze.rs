use nfpf_core::participation::normalized_magnitudes;
use nfpf_core::{
    decompose, nonlinear_pf, rank_states, Complex64, LoadedModel, ModalBasis, SecondOrderNF,
};
use serde::Serialize;

use crate::args::Alpha;
use crate::error::CliResult;
use crate::output::{header, num, Blocks};

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub alpha: Alpha,
    pub denom_tol: f64,
    /// Report active triples with `|lambda_p + lambda_q - lambda_i|` up to this.
    pub near_tol: f64,
}

#[derive(Debug, Serialize)]
pub struct ModeRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub freq_hz: f64,
    pub damping_ratio: f64,
}

/// `|PF|` per state (rows) and reported mode (columns).
#[derive(Debug, Serialize)]
pub struct PfTable {
    pub modes: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct LedgerRow {
    pub i: usize,
    pub p: usize,
    pub q: usize,
    pub abs_denom: f64,
    pub abs_coeff: f64,
    pub dropped: bool,
}

#[derive(Debug, Serialize)]
pub struct Ranking {
    pub mode: usize,
    pub freq_hz: f64,
    pub linear: Vec<(String, f64)>,
    pub nonlinear: Vec<(String, f64)>,
    pub changed: bool,
}

#[derive(Debug, Serialize)]
pub struct Warning {
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub states: Vec<String>,
    pub alpha: Vec<f64>,
    pub denom_tol: f64,
    pub modes: Vec<ModeRow>,
    pub linear: PfTable,
    pub linear_normalized: PfTable,
    pub nonlinear: PfTable,
    pub nonlinear_normalized: PfTable,
    pub resonance_ledger: Vec<LedgerRow>,
    /// Entities ranked: generator speeds for swing models, else all states.
    pub ranked_over: Vec<String>,
    pub rankings: Vec<Ranking>,
    pub warnings: Vec<Warning>,
}

fn table(modes: &[usize], n: usize, value: impl Fn(usize, usize) -> f64) -> PfTable {
    PfTable {
        modes: modes.iter().map(|i| i + 1).collect(),
        rows: (0..n)
            .map(|k| modes.iter().map(|&i| value(k, i)).collect())
            .collect(),
    }
}

fn normalized_table(modes: &[usize], n: usize, pf: impl Fn(usize, usize) -> Complex64) -> PfTable {
    let cols: Vec<Vec<f64>> = modes
        .iter()
        .map(|&i| normalized_magnitudes(&(0..n).map(|k| pf(k, i)).collect::<Vec<_>>()))
        .collect();
    PfTable {
        modes: modes.iter().map(|i| i + 1).collect(),
        rows: (0..n)
            .map(|k| cols.iter().map(|c| c[k]).collect())
            .collect(),
    }
}

fn ledger(basis: &ModalBasis, nf: &SecondOrderNF, near_tol: f64) -> Vec<LedgerRow> {
    let n = basis.n();
    let l = basis.lambdas();
    let limit = near_tol.max(nf.denom_tol());
    // coefficients below this are roundoff
    let c_floor = 1e-10 * nf.c().max_abs();
    let mut rows = Vec::new();
    for i in 0..n {
        for p in 0..n {
            for q in p..n {
                let d = (l[p] + l[q] - l[i]).norm();
                let c = nf.c().get(i, p, q).norm();
                let dropped = d <= nf.denom_tol();
                if dropped || (d <= limit && c > c_floor) {
                    rows.push(LedgerRow {
                        i: i + 1,
                        p: p + 1,
                        q: q + 1,
                        abs_denom: d,
                        abs_coeff: c,
                        dropped,
                    });
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        a.abs_denom
            .total_cmp(&b.abs_denom)
            .then((a.i, a.p, a.q).cmp(&(b.i, b.p, b.q)))
    });
    rows
}

fn ordering(values: &[Complex64], names: &[String]) -> CliResult<Vec<(String, f64)>> {
    Ok(rank_states(values)?
        .into_iter()
        .map(|(k, v)| (names[k].clone(), v))
        .collect())
}

pub fn analyze(loaded: &LoadedModel, opts: &AnalyzeOptions) -> CliResult<AnalysisReport> {
    let model = loaded.quadratic();
    let n = model.n();
    let alpha = opts.alpha.resolve(n)?;
    let basis = decompose(model.a())?;
    let nf = SecondOrderNF::build(model, &basis, opts.denom_tol)?;
    let set = nonlinear_pf(&basis, &nf, &alpha)?;

    let modes: Vec<ModeRow> = (0..n)
        .map(|i| {
            let l = basis.lambda(i);
            ModeRow {
                index: i + 1,
                re: l.re,
                im: l.im,
                freq_hz: basis.freq_hz(i),
                damping_ratio: basis.damping_ratio(i),
            }
        })
        .collect();
    let reps: Vec<usize> = basis.representatives().collect();

    let (ranked_idx, ranked_over): (Vec<usize>, Vec<String>) = match loaded.swing() {
        Some(sys) => (0..sys.machines())
            .map(|g| (sys.speed_index(g), format!("G{}", g + 1)))
            .unzip(),
        None => (0..n).map(|k| (k, model.labels()[k].clone())).unzip(),
    };
    let mut rankings = Vec::new();
    for i in basis.oscillatory() {
        let lin: Vec<Complex64> = ranked_idx.iter().map(|&k| set.linear()[(k, i)]).collect();
        let nl: Vec<Complex64> = ranked_idx
            .iter()
            .map(|&k| set.nonlinear()[(k, i)])
            .collect();
        let linear = ordering(&lin, &ranked_over)?;
        let nonlinear = ordering(&nl, &ranked_over)?;
        let changed = linear.iter().zip(&nonlinear).any(|(a, b)| a.0 != b.0);
        rankings.push(Ranking {
            mode: i + 1,
            freq_hz: basis.freq_hz(i),
            linear,
            nonlinear,
            changed,
        });
    }

    let warnings = nf
        .warnings()
        .into_iter()
        .map(|message| Warning {
            stage: "normalform",
            message,
        })
        .collect();

    Ok(AnalysisReport {
        states: model.labels().to_vec(),
        alpha,
        denom_tol: opts.denom_tol,
        modes,
        linear: table(&reps, n, |k, i| set.linear()[(k, i)].norm()),
        linear_normalized: normalized_table(&reps, n, |k, i| set.linear()[(k, i)]),
        nonlinear: table(&reps, n, |k, i| set.nonlinear()[(k, i)].norm()),
        nonlinear_normalized: normalized_table(&reps, n, |k, i| set.nonlinear()[(k, i)]),
        resonance_ledger: ledger(&basis, &nf, opts.near_tol),
        ranked_over,
        rankings,
        warnings,
    })
}

fn render_table(out: &mut Blocks, name: &str, states: &[String], t: &PfTable) {
    let mut h = header(&["state", "label"]);
    h.extend(t.modes.iter().map(|i| format!("mode{i}")));
    out.block(name, &h);
    for (k, row) in t.rows.iter().enumerate() {
        let mut cells = vec![(k + 1).to_string(), states[k].clone()];
        cells.extend(row.iter().map(|v| num(*v)));
        out.row(&cells);
    }
}

fn render_order(order: &[(String, f64)]) -> String {
    order
        .iter()
        .map(|(name, v)| format!("{name}={v:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl AnalysisReport {
    pub fn render_text(&self) -> String {
        let mut out = Blocks::new();
        out.block(
            "modes",
            &header(&["index", "re", "im", "freq_hz", "damping_ratio"]),
        );
        for m in &self.modes {
            out.row(&[
                m.index.to_string(),
                num(m.re),
                num(m.im),
                num(m.freq_hz),
                num(m.damping_ratio),
            ]);
        }
        render_table(&mut out, "linear_pf", &self.states, &self.linear);
        render_table(
            &mut out,
            "linear_pf_normalized",
            &self.states,
            &self.linear_normalized,
        );
        render_table(&mut out, "nonlinear_pf", &self.states, &self.nonlinear);
        render_table(
            &mut out,
            "nonlinear_pf_normalized",
            &self.states,
            &self.nonlinear_normalized,
        );
        out.block(
            "resonance_ledger",
            &header(&["i", "p", "q", "abs_denom", "abs_coeff", "status"]),
        );
        for r in &self.resonance_ledger {
            out.row(&[
                r.i.to_string(),
                r.p.to_string(),
                r.q.to_string(),
                num(r.abs_denom),
                num(r.abs_coeff),
                if r.dropped { "dropped" } else { "near" }.to_string(),
            ]);
        }
        out.block(
            "ranking",
            &header(&["mode", "freq_hz", "linear", "nonlinear", "changed"]),
        );
        for r in &self.rankings {
            out.row(&[
                r.mode.to_string(),
                num(r.freq_hz),
                render_order(&r.linear),
                render_order(&r.nonlinear),
                if r.changed { "yes" } else { "no" }.to_string(),
            ]);
        }
        out.block("warnings", &header(&["stage", "message"]));
        for w in &self.warnings {
            out.row(&[w.stage.to_string(), format!("\"{}\"", w.message)]);
        }
        out.finish()
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
