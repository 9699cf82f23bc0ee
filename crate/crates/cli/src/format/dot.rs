//! Graphviz rendering of an equilibrium report.

use std::fmt::Write as _;

use fdgame::game::EquilibriumReport;
use fdgame::NodeSet;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DotOptions {
    /// Append a second digraph for the reduced graph.
    pub reduced: bool,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn label(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

/// FMDC digraph. Abstract Nash nodes get a double periphery and every
/// multi-node FD equilibrium becomes a labelled cluster. Free nodes come
/// first in index order, then clusters by smallest member.
pub fn emit_dot(report: &EquilibriumReport, options: DotOptions) -> String {
    let names = report.situations();
    let clustered: NodeSet = report
        .fd_equilibria
        .iter()
        .filter(|eq| eq.len() > 1)
        .fold(NodeSet::new(), |acc, eq| acc.union(eq));
    let node_line = |out: &mut String, indent: &str, n| {
        let attrs = if report.abstract_nash.contains(n) {
            " [peripheries=2]"
        } else {
            ""
        };
        writeln!(out, "{indent}{}{attrs};", quote(names.name(n))).unwrap();
    };

    let mut out = String::from("digraph fmdc {\n");
    for n in names.ids().filter(|&n| !clustered.contains(n)) {
        node_line(&mut out, "  ", n);
    }
    for (i, eq) in report.fd_equilibria.iter().filter(|eq| eq.len() > 1).enumerate() {
        writeln!(out, "  subgraph cluster_{i} {{").unwrap();
        writeln!(out, "    label={};", quote(&label(&names.names_of(eq)))).unwrap();
        for n in eq {
            node_line(&mut out, "    ", n);
        }
        out.push_str("  }\n");
    }
    for (s, t) in report.fmdc.named_arcs() {
        writeln!(out, "  {} -> {};", quote(s), quote(t)).unwrap();
    }
    out.push_str("}\n");

    if options.reduced {
        let reduced = report.reduced.graph();
        let terminal = reduced.universe().ids().filter(|&c| reduced.successors(c).is_empty());
        let terminal: NodeSet = terminal.collect();
        out.push_str("digraph reduced {\n");
        for c in reduced.universe().ids() {
            let attrs = if terminal.contains(c) { " [peripheries=2]" } else { "" };
            writeln!(out, "  {}{attrs};", quote(reduced.universe().name(c))).unwrap();
        }
        for (s, t) in reduced.named_arcs() {
            writeln!(out, "  {} -> {};", quote(s), quote(t)).unwrap();
        }
        out.push_str("}\n");
    }
    out
}
