use std::fmt;

use super::{Label, Term};

// Nodes lying on a cycle get a `rec` binder at their first occurrence.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cyclic = self.cyclic_nodes();
        let mut out = String::new();
        let mut stack = Vec::new();
        self.write_node(0, &cyclic, &mut stack, &mut out);
        f.write_str(&out)
    }
}

impl Term {
    /// Nodes that can reach themselves.
    fn cyclic_nodes(&self) -> Vec<bool> {
        let n = self.nodes.len();
        (0..n)
            .map(|start| {
                let mut seen = vec![false; n];
                let mut stack = self.nodes[start].children.clone();
                while let Some(i) = stack.pop() {
                    if i == start {
                        return true;
                    }
                    if !seen[i] {
                        seen[i] = true;
                        stack.extend(self.nodes[i].children.iter().copied());
                    }
                }
                false
            })
            .collect()
    }

    fn write_node(&self, i: usize, cyclic: &[bool], stack: &mut Vec<usize>, out: &mut String) {
        if stack.contains(&i) {
            out.push_str(&binder(i));
            return;
        }
        let node = &self.nodes[i];
        let body = |stack: &mut Vec<usize>, out: &mut String| match &node.label {
            Label::Var(x) => out.push_str(x),
            Label::Fun(name) => {
                out.push_str(name);
                if !node.children.is_empty() {
                    out.push('(');
                    for (k, &c) in node.children.iter().enumerate() {
                        if k > 0 {
                            out.push(',');
                        }
                        self.write_node(c, cyclic, stack, out);
                    }
                    out.push(')');
                }
            }
        };
        if cyclic[i] {
            let name = binder(i);
            out.push_str("rec ");
            out.push_str(&name);
            out.push_str(" = ");
            stack.push(i);
            body(stack, out);
            stack.pop();
            out.push_str(" in ");
            out.push_str(&name);
        } else {
            body(stack, out);
        }
    }
}

fn binder(i: usize) -> String {
    format!("X{i}")
}
