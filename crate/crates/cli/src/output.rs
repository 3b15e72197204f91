use std::fmt::Write;

use tapst::steiner::{SteinerInstance, SteinerRun, SteinerTraceRow};
use tapst::wtap::{WtapRun, WtapTraceRow};

fn opt_ms(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

/// Solution file listing the chosen links of the solved instance (1-based ends).
pub fn wtap_solution_text(run: &WtapRun) -> String {
    let mut out = String::from("# tapst wtap solution v1\n");
    writeln!(out, "WEIGHT {}", run.weight).unwrap();
    for &id in &run.solution {
        let l = run.instance.link(id);
        writeln!(out, "LINK {} {} {}", l.a + 1, l.b + 1, l.weight).unwrap();
    }
    out
}

pub fn steiner_solution_text(instance: &SteinerInstance, run: &SteinerRun) -> String {
    let mut out = String::from("# tapst steiner solution v1\n");
    writeln!(out, "WEIGHT {}", run.weight).unwrap();
    for &id in &run.solution {
        let e = instance.edge(id);
        writeln!(out, "EDGE {} {} {}", e.u + 1, e.v + 1, e.weight).unwrap();
    }
    out
}

fn csv_text(comment: &str, header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).unwrap();
    for row in rows {
        writer.write_record(&row).unwrap();
    }
    let body = String::from_utf8(writer.into_inner().unwrap()).unwrap();
    format!("# {comment}\n{body}")
}

pub fn wtap_trace_csv(trace: &[WtapTraceRow]) -> String {
    let rows = trace
        .iter()
        .map(|r| {
            vec![
                r.iteration.to_string(),
                r.potential_before.to_string(),
                r.potential_after.to_string(),
                r.solution_weight.to_string(),
                r.component_size.to_string(),
                r.drop_wbar.to_string(),
                r.component_weight.to_string(),
                r.gain.to_string(),
                r.accepted.to_string(),
                opt_ms(r.elapsed_ms),
            ]
        })
        .collect();
    csv_text(
        "tapst wtap trace v1",
        &[
            "iteration",
            "potential_before",
            "potential_after",
            "solution_weight",
            "component_size",
            "drop_wbar",
            "component_weight",
            "gain",
            "accepted",
            "elapsed_ms",
        ],
        rows,
    )
}

pub fn steiner_trace_csv(trace: &[SteinerTraceRow]) -> String {
    let rows = trace
        .iter()
        .map(|r| {
            vec![
                r.iteration.to_string(),
                r.potential_before.to_string(),
                r.potential_after.to_string(),
                r.solution_weight.to_string(),
                r.component_size.to_string(),
                r.drop_wbar.to_string(),
                r.component_weight.to_string(),
                r.gain.to_string(),
                r.accepted.to_string(),
                opt_ms(r.elapsed_ms),
                r.k.to_string(),
            ]
        })
        .collect();
    csv_text(
        "tapst steiner trace v1",
        &[
            "iteration",
            "potential_before",
            "potential_after",
            "solution_weight",
            "component_size",
            "drop_wbar",
            "component_weight",
            "gain",
            "accepted",
            "elapsed_ms",
            "k",
        ],
        rows,
    )
}
