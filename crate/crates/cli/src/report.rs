//! Report documents: serde types for JSON output and line-oriented text.
//!
//! Every JSON document carries `format_version` and `command`. Situation
//! sets are arrays of names in index order.

use std::fmt::Write as _;

use fdgame::choice::{ChoiceAuditReport, Counterexample, Implication, Verdict};
use fdgame::evolution::{AbsorptionStats, Outcome, Tactic};
use fdgame::game::EquilibriumReport;
use fdgame::normal_form::NormalFormGame;
use fdgame::{NameTable, NodeId};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub situations: Vec<String>,
    pub agents: Vec<String>,
    /// FMDC arcs as `[from, to]`, lexicographic by index.
    pub fmdc: Vec<[String; 2]>,
    /// Strongly connected components, sinks of the reduced graph first.
    pub components: Vec<Vec<String>>,
    /// Reduced-graph arcs as indices into `components`.
    pub reduced_arcs: Vec<[usize; 2]>,
    pub abstract_nash: Vec<String>,
    pub fd_equilibria: Vec<Vec<String>>,
}

impl Analysis {
    pub fn new(agents: &NameTable, report: &EquilibriumReport) -> Self {
        let names = report.situations();
        Analysis {
            situations: names.names().to_vec(),
            agents: agents.names().to_vec(),
            fmdc: report
                .fmdc
                .named_arcs()
                .map(|(s, t)| [s.to_owned(), t.to_owned()])
                .collect(),
            components: report
                .partition
                .components()
                .iter()
                .map(|c| names.names_of(c))
                .collect(),
            reduced_arcs: report
                .reduced
                .graph()
                .arcs()
                .map(|(s, t)| [s.index(), t.index()])
                .collect(),
            abstract_nash: names.names_of(&report.abstract_nash),
            fd_equilibria: report.fd_equilibria.iter().map(|e| names.names_of(e)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeDoc {
    pub format_version: u32,
    pub command: String,
    #[serde(flatten)]
    pub analysis: Analysis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FromNfgDoc {
    pub format_version: u32,
    pub command: String,
    pub players: Vec<String>,
    pub strategies: Vec<Vec<String>>,
    /// Pure Nash equilibria found by scanning unilateral deviations.
    pub pure_nash: Vec<String>,
    #[serde(flatten)]
    pub analysis: Analysis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlinkDoc {
    pub format_version: u32,
    pub command: String,
    pub tactic: String,
    pub outcome: String,
    #[serde(flatten)]
    pub analysis: Analysis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleDoc {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub x: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    pub passed: bool,
    pub counterexample: Option<CounterexampleDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCheck {
    pub passed: bool,
    pub counterexample: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationDoc {
    pub hypotheses_hold: bool,
    pub conclusion: PairCheck,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditDoc {
    pub format_version: u32,
    pub command: String,
    pub ground: Vec<String>,
    pub subsets: usize,
    pub acyclic: bool,
    pub kappa: SetCheck,
    pub alpha: PairCheck,
    pub iota: PairCheck,
    pub semilattice: bool,
    pub domain_total: bool,
    pub domain_size: usize,
    pub outside_domain: Option<Vec<String>>,
    pub prop_intersection: ImplicationDoc,
    pub prop_iota_implies_alpha: ImplicationDoc,
    pub prop_kappa_alpha_implies_iota: ImplicationDoc,
}

fn pair_check(names: &NameTable, v: &Verdict<Counterexample>) -> PairCheck {
    PairCheck {
        passed: v.passed(),
        counterexample: v.counterexample().map(|c| CounterexampleDoc {
            a: names.names_of(&c.a),
            b: names.names_of(&c.b),
            x: names.name(c.x).to_owned(),
        }),
    }
}

fn implication(names: &NameTable, i: &Implication) -> ImplicationDoc {
    ImplicationDoc {
        hypotheses_hold: i.hypotheses_hold,
        conclusion: pair_check(names, &i.conclusion),
        holds: i.holds(),
    }
}

impl AuditDoc {
    pub fn new(r: &ChoiceAuditReport) -> Self {
        let g = &r.ground;
        AuditDoc {
            format_version: FORMAT_VERSION,
            command: "choice-audit".into(),
            ground: g.names().to_vec(),
            subsets: r.subsets,
            acyclic: r.acyclic,
            kappa: SetCheck {
                passed: r.kappa.passed(),
                counterexample: r.kappa.counterexample().map(|s| g.names_of(s)),
            },
            alpha: pair_check(g, &r.alpha),
            iota: pair_check(g, &r.iota),
            semilattice: r.semilattice,
            domain_total: r.domain_total,
            domain_size: r.domain_size,
            outside_domain: r.outside_domain.as_ref().map(|s| g.names_of(s)),
            prop_intersection: implication(g, &r.propositions.intersection),
            prop_iota_implies_alpha: implication(g, &r.propositions.iota_implies_alpha),
            prop_kappa_alpha_implies_iota: implication(g, &r.propositions.kappa_alpha_implies_iota),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumHits {
    pub members: Vec<String>,
    pub hits: u64,
    /// Exact fraction `hits/trials` in lowest terms.
    pub frequency: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolveDoc {
    pub format_version: u32,
    pub command: String,
    pub start: String,
    pub trials: u64,
    pub max_steps: usize,
    pub seed: u64,
    pub equilibria: Vec<EquilibriumHits>,
    pub non_absorbed: u64,
}

impl EvolveDoc {
    pub fn new(names: &NameTable, s: &AbsorptionStats) -> Self {
        EvolveDoc {
            format_version: FORMAT_VERSION,
            command: "evolve".into(),
            start: names.name(s.start).to_owned(),
            trials: s.trials,
            max_steps: s.max_steps,
            seed: s.base_seed,
            equilibria: s
                .equilibria
                .iter()
                .enumerate()
                .map(|(i, eq)| EquilibriumHits {
                    members: names.names_of(eq),
                    hits: s.hits[i],
                    frequency: s.frequency(i).to_string(),
                })
                .collect(),
            non_absorbed: s.non_absorbed,
        }
    }
}

/// `{a b c}`; names may contain commas, so members are space separated.
fn braces(names: &[String]) -> String {
    format!("{{{}}}", names.join(" "))
}

pub fn analysis_text(a: &Analysis) -> String {
    let mut out = String::new();
    writeln!(out, "situations {}", a.situations.join(" ")).unwrap();
    writeln!(out, "agents {}", a.agents.join(" ")).unwrap();
    for [s, t] in &a.fmdc {
        writeln!(out, "fmdc {s} -> {t}").unwrap();
    }
    for (i, c) in a.components.iter().enumerate() {
        writeln!(out, "component {i} {}", braces(c)).unwrap();
    }
    for [s, t] in &a.reduced_arcs {
        writeln!(out, "reduced {s} -> {t}").unwrap();
    }
    writeln!(out, "abstract_nash {}", braces(&a.abstract_nash)).unwrap();
    for e in &a.fd_equilibria {
        writeln!(out, "fd_equilibrium {}", braces(e)).unwrap();
    }
    out
}

pub fn from_nfg_text(nf: &NormalFormGame, doc: &FromNfgDoc) -> String {
    let mut out = String::new();
    for p in 0..nf.player_count() {
        writeln!(
            out,
            "strategies {} {}",
            nf.players().names()[p],
            doc.strategies[p].join(" ")
        )
        .unwrap();
    }
    writeln!(out, "pure_nash {}", braces(&doc.pure_nash)).unwrap();
    out + &analysis_text(&doc.analysis)
}

pub fn blink_doc(tactic: Tactic, outcome: Outcome, analysis: Analysis) -> BlinkDoc {
    BlinkDoc {
        format_version: FORMAT_VERSION,
        command: "blink".into(),
        tactic: tactic.name().into(),
        outcome: outcome.name().into(),
        analysis,
    }
}

pub fn blink_text(doc: &BlinkDoc) -> String {
    format!(
        "tactic {}\noutcome {}\n{}",
        doc.tactic,
        doc.outcome,
        analysis_text(&doc.analysis)
    )
}

fn pair_text(label: &str, p: &PairCheck) -> String {
    match &p.counterexample {
        None => format!("{label} pass\n"),
        Some(c) => format!("{label} fail A={} B={} x={}\n", braces(&c.a), braces(&c.b), c.x),
    }
}

fn implication_text(label: &str, i: &ImplicationDoc) -> String {
    if !i.hypotheses_hold {
        return format!("{label} vacuous\n");
    }
    pair_text(label, &i.conclusion).replacen(" pass", " holds", 1)
}

pub fn audit_text(d: &AuditDoc) -> String {
    let mut out = String::new();
    writeln!(out, "ground {}", d.ground.join(" ")).unwrap();
    writeln!(out, "subsets {}", d.subsets).unwrap();
    writeln!(out, "acyclic {}", d.acyclic).unwrap();
    match &d.kappa.counterexample {
        None => out.push_str("kappa pass\n"),
        Some(s) => writeln!(out, "kappa fail {}", braces(s)).unwrap(),
    }
    out += &pair_text("alpha", &d.alpha);
    out += &pair_text("iota", &d.iota);
    writeln!(out, "semilattice {}", d.semilattice).unwrap();
    writeln!(out, "domain_total {}", d.domain_total).unwrap();
    writeln!(out, "domain_size {}", d.domain_size).unwrap();
    if let Some(s) = &d.outside_domain {
        writeln!(out, "outside_domain {}", braces(s)).unwrap();
    }
    out += &implication_text("prop_intersection", &d.prop_intersection);
    out += &implication_text("prop_iota_implies_alpha", &d.prop_iota_implies_alpha);
    out += &implication_text("prop_kappa_alpha_implies_iota", &d.prop_kappa_alpha_implies_iota);
    out
}

pub fn evolve_text(d: &EvolveDoc) -> String {
    let mut out = String::new();
    writeln!(out, "start {}", d.start).unwrap();
    writeln!(out, "trials {}", d.trials).unwrap();
    writeln!(out, "max_steps {}", d.max_steps).unwrap();
    writeln!(out, "seed {}", d.seed).unwrap();
    for e in &d.equilibria {
        writeln!(
            out,
            "equilibrium {} hits {} frequency {}",
            braces(&e.members),
            e.hits,
            e.frequency
        )
        .unwrap();
    }
    writeln!(out, "non_absorbed {}", d.non_absorbed).unwrap();
    out
}

/// One line per trajectory: visited situation names separated by spaces.
pub fn trajectory_line(names: &NameTable, steps: &[NodeId]) -> String {
    let parts: Vec<&str> = steps.iter().map(|&s| names.name(s)).collect();
    parts.join(" ")
}
