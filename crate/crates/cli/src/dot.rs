//! Graphviz DOT rendering: participants clustered by coalition, solid
//! arrows for benefit, dashed lines for competition.

use fedcoalitions::Partition;

use crate::instance::Instance;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Render `inst` with participants grouped into `partition`'s coalitions.
///
/// Output is deterministic: coalitions in canonical partition order, edges
/// in sorted order. Pipe it through `dot -Tsvg` to draw.
pub fn render(inst: &Instance, partition: &Partition) -> String {
    let mut out = String::new();
    out.push_str("digraph coalitions {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    for (k, block) in partition.blocks().iter().enumerate() {
        out.push_str(&format!("  subgraph cluster_{k} {{\n"));
        out.push_str(&format!("    label=\"coalition {k}\";\n"));
        for v in block.members() {
            out.push_str(&format!(
                "    v{} [label=\"{}\"];\n",
                v.index(),
                escape(&inst.label(v.index()))
            ));
        }
        out.push_str("  }\n");
    }
    for (src, dst, w) in inst.benefit.edges() {
        out.push_str(&format!(
            "  v{} -> v{} [label=\"{w}\"];\n",
            src.index(),
            dst.index()
        ));
    }
    for (a, b) in inst.competing.pairs() {
        out.push_str(&format!(
            "  v{} -> v{} [dir=none, style=dashed, constraint=false];\n",
            a.index(),
            b.index()
        ));
    }
    out.push_str("}\n");
    out
}
