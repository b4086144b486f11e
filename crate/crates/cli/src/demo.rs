//! `--demo mantel`: the triangle-free example end to end, next to the known
//! values.

use flagsos::graph::{Graph, IntersectionType};
use flagsos::rational::{frac, to_string, Rational};
use flagsos::sdp::{assemble_flag_sdp, assemble_gp_sdp_with, flag_sos_target, GpMode, SolverOptions};
use flagsos::symrep::{partitions_lex_geq, symmetry_adapted_basis};
use flagsos::verify;
use flagsos::Result;
use serde_json::{json, Value};

use crate::Outcome;

struct Row {
    quantity: String,
    expected: String,
    computed: String,
}

impl Row {
    fn ok(&self) -> bool {
        self.expected == self.computed
    }
}

fn row(quantity: impl Into<String>, expected: impl ToString, computed: impl ToString) -> Row {
    Row { quantity: quantity.into(), expected: expected.to_string(), computed: computed.to_string() }
}

fn rat(q: &Rational) -> String {
    to_string(q)
}

pub fn mantel(opts: &SolverOptions, denom: u64) -> Result<Outcome> {
    let k3 = Graph::complete(3);
    let mut rows = Vec::new();

    let inst = assemble_flag_sdp(&IntersectionType::vertex(), 2, 3, &k3)?;
    let table = &inst.families[0].table;
    let expected = [
        [[frac(1, 1), frac(1, 3), frac(0, 1)], [frac(0, 1), frac(1, 3), frac(1, 3)]],
        [[frac(0, 1), frac(1, 3), frac(1, 3)], [frac(0, 1), frac(0, 1), frac(1, 3)]],
    ];
    for i in 0..2 {
        for j in 0..2 {
            for h in 0..3 {
                rows.push(row(format!("d_{{F{i},F{j}}}(1_H{h})"), rat(&expected[i][j][h]), rat(&table.entries[i][j][h])));
            }
        }
    }

    let sol = inst.solve(opts)?;
    rows.push(row("numeric bound (6 digits)", "0.500000", format!("{:.6}", sol.gamma)));
    let (cert, report) = verify::certify_flag(&inst, &sol, denom)?;
    rows.push(row("exact bound", "1/2", rat(&cert.bound)));
    let q = &cert.blocks[0].matrix;
    let q_expected = verify::mantel_q();
    for i in 0..2 {
        for j in 0..2 {
            rows.push(row(format!("Q[{i}][{j}]"), rat(&q_expected[i][j]), rat(&q[i][j])));
        }
    }
    for (h, (e, c)) in [frac(1, 2), frac(-1, 6), frac(-1, 6)].iter().zip(&report.contributions).enumerate() {
        rows.push(row(format!("a_H{h}"), rat(e), rat(c)));
    }
    rows.push(row("certificate re-verified", true, report.passed));

    let n = 5;
    let m5 = verify::verify_mantel_flag_sos(n)?;
    rows.push(row("n=5: max triangle-free density", "3/5", rat(&m5.max_density)));
    rows.push(row("n=5: chained identity on every graph", true, m5.chained_identity));
    rows.push(row("n=5: density ≤ 1/2 + err pointwise", true, m5.pointwise_bound));

    let s5 = verify::verify_symmetric_mantel(n)?;
    rows.push(row("n=5: Q_(n)[0][1] / |Σx|", rat(&frac(-8, 5)), rat(&s5.off_diagonal_scaled)));
    rows.push(row("n=5: det Q_(n)", "0", rat(&s5.det_q_n)));
    rows.push(row("n=5: Q_(n-1,1)", rat(&frac(24, 5)), rat(&s5.q_n1)));
    rows.push(row("n=5: symmetric identity", true, s5.scaled_identity && s5.weighted_identity));

    let lambdas = partitions_lex_geq(n, 1)?;
    let basis = symmetry_adapted_basis(n, 1, &lambdas)?;
    let target = flag_sos_target(inst.families[0].flags(), q, n)?;
    let gp = assemble_gp_sdp_with(&target, 1, &lambdas, &basis, &k3, GpMode::Feasibility, 0)?;
    let sizes: Vec<String> = gp.partitions.iter().zip(gp.block_sizes()).map(|(p, s)| format!("{p}:{s}")).collect();
    rows.push(row("n=5: blocks", "(5):2 (4,1):1", sizes.join(" ")));
    let gsol = gp.solve(opts)?;
    let (_, gr) = verify::certify_gp(&gp, &gsol, denom, opts)?;
    rows.push(row("n=5: symmetric certificate verified", true, gr.passed));

    let passed = rows.iter().all(Row::ok);
    let width = rows.iter().map(|r| r.quantity.chars().count()).max().unwrap_or(0);
    let mut text = format!("{:<width$}  {:<14} {:<14} ok\n", "quantity", "expected", "computed");
    for r in &rows {
        let pad = width - r.quantity.chars().count();
        text.push_str(&format!("{}{}  {:<14} {:<14} {}\n", r.quantity, " ".repeat(pad), r.expected, r.computed, if r.ok() { "yes" } else { "NO" }));
    }
    let value = json!({
        "rows": rows.iter().map(|r| json!({"quantity": r.quantity, "expected": r.expected, "computed": r.computed, "ok": r.ok()})).collect::<Vec<Value>>(),
        "passed": passed,
    });
    Ok(Outcome { value, passed, text: Some(text) })
}
