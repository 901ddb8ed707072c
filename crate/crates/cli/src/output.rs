use std::io::Write;
use std::time::Duration;

use clap::ValueEnum;
use ghybrid::asp::SearchResult;
use ghybrid::hybrid::{CrossCheckReport, HybridInterpretation, HybridKb, KbReport, ModelReport, Target};
use ghybrid::logic::{GuardReport, Program, WithDomain};
use ghybrid::syntax::ModelFile;
use serde_json::{json, Value};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON object per line.
    Structured,
}

pub struct Out {
    format: Format,
    deterministic: bool,
    stdout: std::io::StdoutLock<'static>,
}

fn model_json(m: &ModelFile) -> Value {
    let items = |v: &[(String, Vec<String>)]| -> Vec<Value> { v.iter().map(|(p, a)| json!([p, a])).collect() };
    json!({
        "domain": m.domain,
        "sigma": m.sigma,
        "nominals": m.nominals,
        "extensions": items(&m.extensions),
        "atoms": items(&m.atoms),
    })
}

pub fn target_text(t: &Target) -> String {
    match t {
        Target::Predicate(p) => format!("pred {p}"),
        Target::Concept(c) => format!("concept {c}"),
        Target::Atom(a) => format!("atom {a}"),
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "sat"
    } else {
        "unsat"
    }
}

impl Out {
    pub fn new(format: Format, deterministic: bool) -> Self {
        Out {
            format,
            deterministic,
            stdout: std::io::stdout().lock(),
        }
    }

    fn line(&mut self, s: impl std::fmt::Display) {
        // A closed pipe is not worth a panic.
        let _ = writeln!(self.stdout, "{s}");
    }

    fn record(&mut self, v: Value) {
        self.line(v);
    }

    pub fn check(&mut self, kb: &HybridKb, r: &KbReport) {
        if self.format == Format::Structured {
            let guards: Vec<Value> = r
                .guards
                .offending
                .iter()
                .map(|(i, g)| {
                    let vars = match g {
                        GuardReport::Unguarded(v) => v.iter().cloned().collect(),
                        _ => Vec::new(),
                    };
                    json!({"rule": i, "text": kb.program.rules[*i].to_string(), "unguarded": vars})
                })
                .collect();
            self.record(json!({
                "type": "check",
                "clean": r.is_clean(),
                "axioms": kb.dl.axioms.len(),
                "rules": kb.program.len(),
                "program_violations": r.program.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "dl_violations": r.dl.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "unguarded_rules": guards,
            }));
            return;
        }
        self.line(format_args!(
            "{} axioms, {} rules",
            kb.dl.axioms.len(),
            kb.program.len()
        ));
        for v in &r.program {
            self.line(format_args!("program: {v}"));
        }
        for v in &r.dl {
            self.line(format_args!("dl: {v}"));
        }
        for (i, g) in &r.guards.offending {
            if let GuardReport::Unguarded(vars) = g {
                let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
                self.line(format_args!(
                    "unguarded rule {i} (variables {}): {}",
                    vars.join(", "),
                    kb.program.rules[*i]
                ));
            }
        }
        self.line(if r.is_clean() { "CLEAN" } else { "ISSUES" });
    }

    pub fn program(&mut self, p: &Program) {
        if self.format == Format::Structured {
            let rules: Vec<String> = p.rules.iter().map(|r| r.to_string()).collect();
            self.record(json!({"type": "program", "rules": rules}));
        } else {
            let _ = write!(self.stdout, "{p}");
        }
    }

    pub fn model(&mut self, h: &HybridInterpretation) {
        let file = h.to_model_file();
        if self.format == Format::Structured {
            self.record(json!({"type": "model", "k": file.domain.len(), "model": model_json(&file)}));
        } else {
            self.line(format_args!("% MODEL k={}", file.domain.len()));
            let _ = write!(self.stdout, "{file}");
        }
    }

    pub fn result(&mut self, r: &SearchResult<HybridInterpretation>) {
        match r {
            SearchResult::Satisfiable { k, witness } => {
                let file = witness.to_model_file();
                if self.format == Format::Structured {
                    self.record(json!({"type": "result", "status": "satisfiable", "k": k, "model": model_json(&file)}));
                } else {
                    self.line(format_args!("% SATISFIABLE k={k}"));
                    let _ = write!(self.stdout, "{file}");
                }
            }
            SearchResult::ExhaustedUpTo(k) => {
                if self.format == Format::Structured {
                    self.record(json!({"type": "result", "status": "exhausted", "k": k}));
                } else {
                    self.line(format_args!("EXHAUSTED up to k={k}"));
                }
            }
        }
    }

    pub fn verdict(&mut self, kb: &HybridKb, h: &HybridInterpretation, r: &ModelReport) {
        let d = &h.pre.domain;
        let atoms = |v: &[ghybrid::logic::Atom]| -> Vec<String> {
            v.iter().map(|a| WithDomain::new(a, d).to_string()).collect()
        };
        let axioms: Vec<String> = r.violated_axioms.iter().map(|&i| kb.dl.axioms[i].to_string()).collect();
        let missing = atoms(&r.diagnosis.missing);
        let unsupported = atoms(&r.diagnosis.unsupported);
        let violated: Vec<String> = r
            .diagnosis
            .violated
            .iter()
            .map(|rule| WithDomain::new(rule, d).to_string())
            .collect();
        if self.format == Format::Structured {
            self.record(json!({
                "type": "verdict",
                "model": r.is_model(),
                "violated_axioms": axioms,
                "missing": missing,
                "unsupported": unsupported,
                "violated_constraints": violated,
                "projection_rules": r.projection.program.len(),
                "deleted_rules": r.projection.deleted.len(),
            }));
            return;
        }
        self.line(if r.is_model() { "MODEL" } else { "NOT A MODEL" });
        self.line(format_args!(
            "projection: {} rules kept, {} deleted",
            r.projection.program.len(),
            r.projection.deleted.len()
        ));
        for a in axioms {
            self.line(format_args!("violated axiom: {a}"));
        }
        for a in missing {
            self.line(format_args!("missing: {a}"));
        }
        for a in unsupported {
            self.line(format_args!("unsupported: {a}"));
        }
        for c in violated {
            self.line(format_args!("violated constraint: {c}"));
        }
    }

    pub fn crosscheck(&mut self, name: &str, t: &Target, r: &CrossCheckReport) {
        let opt = |o: Option<bool>| match o {
            Some(true) => "ok",
            Some(false) => "FAILED",
            None => "-",
        };
        if self.format == Format::Structured {
            let rows: Vec<Value> = r
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "k": row.k,
                        "direct": row.direct,
                        "translated": row.translated,
                        "forward_ok": row.forward_ok,
                        "backward_ok": row.backward_ok,
                    })
                })
                .collect();
            self.record(json!({
                "type": "crosscheck",
                "name": name,
                "target": target_text(t),
                "agree": r.ok(),
                "rows": rows,
            }));
            return;
        }
        self.line(format_args!(
            "{name} [{}]: {}",
            target_text(t),
            if r.ok() { "AGREE" } else { "DISAGREE" }
        ));
        for row in &r.rows {
            self.line(format_args!(
                "  k={} direct={} translated={} forward={} backward={}",
                row.k,
                verdict(row.direct),
                verdict(row.translated),
                opt(row.forward_ok),
                opt(row.backward_ok)
            ));
        }
    }

    pub fn summary(&mut self, what: &str, n: usize, of: Option<usize>, k_max: usize) {
        if self.format == Format::Structured {
            self.record(json!({"type": "summary", what: n, "total": of, "k_max": k_max}));
        } else {
            match of {
                Some(total) => self.line(format_args!("{n}/{total} {what} (k <= {k_max})")),
                None => self.line(format_args!("{n} {what} (k <= {k_max})")),
            }
        }
    }

    pub fn finish(&mut self, elapsed: Duration) {
        if self.deterministic {
            return;
        }
        let ms = elapsed.as_secs_f64() * 1e3;
        if self.format == Format::Structured {
            self.record(json!({"type": "elapsed", "ms": ms}));
        } else {
            eprintln!("elapsed: {ms:.1} ms");
        }
    }

    pub fn error(&mut self, e: &anyhow::Error, code: u8) {
        let _ = self.stdout.flush();
        if self.format == Format::Structured {
            eprintln!(
                "{}",
                json!({"type": "error", "code": code, "message": format!("{e:#}")})
            );
        } else {
            eprintln!("error: {e:#}");
        }
    }
}
