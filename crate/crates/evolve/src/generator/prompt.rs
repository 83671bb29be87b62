//! Prompt templates and reply parsing for chat backends.

use super::{GeneratorRequest, Reply};

const SYSTEM: &str = include_str!("../../templates/system.txt");

fn template(id: &str) -> Option<&'static str> {
    Some(match id {
        "init" => include_str!("../../templates/init.txt"),
        "e1" => include_str!("../../templates/e1.txt"),
        "e2" => include_str!("../../templates/e2.txt"),
        "m1" => include_str!("../../templates/m1.txt"),
        "m2" => include_str!("../../templates/m2.txt"),
        "m3" => include_str!("../../templates/m3.txt"),
        "correction" => include_str!("../../templates/correction.txt"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub system: String,
    pub user: String,
}

/// Fills the request's template. Unknown template ids are a caller bug.
pub fn render_prompt(req: &GeneratorRequest) -> RenderedPrompt {
    let body = template(req.template_id).unwrap_or_else(|| panic!("no template `{}`", req.template_id));
    let parents = req
        .parents
        .iter()
        .enumerate()
        .map(|(i, p)| format!("Rule {}: {{{}}}\n```\n{}\n```", i + 1, p.thought, p.source))
        .collect::<Vec<_>>()
        .join("\n\n");
    let diagnostic = req.diagnostic.as_ref().map(ToString::to_string).unwrap_or_default();
    let user = body.replace("{{parents}}", &parents).replace("{{diagnostic}}", &diagnostic);
    RenderedPrompt { system: SYSTEM.to_string(), user }
}

/// Splits a reply into its braced thought and fenced expression. Without a
/// fence the whole text is taken as the expression, and parsing will
/// report what is wrong with it.
pub fn extract_reply(text: &str) -> Reply {
    let (source, outside) = match text.find("```") {
        Some(open) => {
            let after = &text[open + 3..];
            // Skip an info string such as "text" on the fence line.
            let body_start = after.find('\n').map_or(after.len(), |n| n + 1);
            let body = &after[body_start..];
            let end = body.find("```").unwrap_or(body.len());
            let rest = body.get(end + 3..).unwrap_or("");
            (body[..end].trim().to_string(), format!("{}{}", &text[..open], rest))
        }
        None => (text.trim().to_string(), text.to_string()),
    };
    let thought = outside
        .find('{')
        .and_then(|a| outside[a + 1..].find('}').map(|b| outside[a + 1..a + 1 + b].trim().to_string()))
        .unwrap_or_default();
    Reply { thought, source }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::{Diagnostic, DiagnosticKind, Operator};
    use crate::generator::Parent;

    #[test]
    fn every_request_renders() {
        let p = Parent { thought: "fill space".into(), source: "vol_util".into() };
        for op in Operator::ALL {
            let parents = if op == Operator::E2 { vec![p.clone(), p.clone()] } else { vec![p.clone()] };
            let r = render_prompt(&GeneratorRequest::operator(op, parents).unwrap());
            assert!(r.user.contains("{fill space}") && !r.user.contains("{{"));
            assert!(r.system.contains("vol_util"));
        }
        let init = render_prompt(&GeneratorRequest::operator(Operator::E1, vec![]).unwrap());
        assert!(!init.user.contains("{{"));
        let fix = render_prompt(&GeneratorRequest::correction(p, Diagnostic::new(DiagnosticKind::SyntaxError, "1:5: syntax: x")));
        assert!(fix.user.contains("syntax error: 1:5: syntax: x"));
    }

    #[test]
    fn replies_split_into_thought_and_code() {
        let r = extract_reply("Sure.\n{Favour tall stacks.}\n```text\nvol_util + 0.1 * adjacency\n```\nDone.");
        assert_eq!(r.thought, "Favour tall stacks.");
        assert_eq!(r.source, "vol_util + 0.1 * adjacency");
        let bare = extract_reply("  vol_util ");
        assert_eq!((bare.thought.as_str(), bare.source.as_str()), ("", "vol_util"));
        let unclosed = extract_reply("{a}\n```\nwaste");
        assert_eq!(unclosed.source, "waste");
    }
}
