use serde::Serialize;

use crate::run::RunReport;

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    passed: bool,
    checked: usize,
    informational: bool,
    witness: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonCommand<'a> {
    name: &'a str,
    verdict: &'static str,
    title: Option<&'a str>,
    checks: Vec<JsonCheck<'a>>,
    notes: Vec<&'a str>,
    error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

#[derive(Serialize)]
struct JsonSummary {
    pass: usize,
    fail: usize,
    error: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    commands: Vec<JsonCommand<'a>>,
    summary: JsonSummary,
}

fn summary(r: &RunReport) -> JsonSummary {
    use crate::run::Verdict::*;
    JsonSummary { pass: r.count(Pass), fail: r.count(Fail), error: r.count(Error) }
}

pub fn render_text(r: &RunReport) -> String {
    let mut out = String::new();
    for o in &r.outcomes {
        out.push_str(&format!("== {} ==\n", o.name));
        if let Some(rep) = &o.report {
            out.push_str(&rep.to_string());
        }
        if let Some(e) = &o.error {
            out.push_str(&format!("error: {e}\n"));
        }
        if let Some(ms) = o.elapsed_ms {
            out.push_str(&format!("time: {ms} ms\n"));
        }
        out.push('\n');
    }
    let s = summary(r);
    out.push_str(&format!("{} commands: {} pass, {} fail, {} error\n", r.outcomes.len(), s.pass, s.fail, s.error));
    out
}

pub fn render_json(r: &RunReport) -> String {
    let commands = r
        .outcomes
        .iter()
        .map(|o| JsonCommand {
            name: &o.name,
            verdict: o.verdict.label(),
            title: o.report.as_ref().map(|rep| rep.title.as_str()),
            checks: o
                .report
                .iter()
                .flat_map(|rep| &rep.checks)
                .map(|c| JsonCheck {
                    name: &c.name,
                    passed: c.passed,
                    checked: c.checked,
                    informational: c.informational,
                    witness: c.witness.as_deref(),
                })
                .collect(),
            notes: o.report.iter().flat_map(|rep| rep.notes.iter().map(String::as_str)).collect(),
            error: o.error.as_deref(),
            elapsed_ms: o.elapsed_ms,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&JsonReport { commands, summary: summary(r) }).expect("serializable report");
    s.push('\n');
    s
}
