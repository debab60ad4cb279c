use std::fmt::Write;

use super::DomainSpec;
use crate::formula::Formula;
use crate::valuation::FluentValuation;

/// Renders a domain in the concrete syntax read by [`super::parse_domain`].
pub fn serialize_domain(spec: &DomainSpec) -> String {
    let names = &spec.fluents;
    let mut out = String::new();
    if !names.is_empty() {
        let _ = writeln!(out, "fluent {};", names.join(", "));
    }
    for action in &spec.physical_actions {
        let _ = write!(out, "action {} {{", action.name);
        if action.precondition != Formula::True {
            let _ = write!(out, " poss {};", action.precondition.display(names));
        }
        for (fluent, rhs) in &action.effects {
            let _ = write!(out, " {} := {};", names[fluent.0], rhs.display(names));
        }
        out.push_str(" }\n");
    }
    for action in &spec.sensing_actions {
        let _ = write!(
            out,
            "sense {} accuracy={:?} {{",
            action.name, action.accuracy
        );
        for guard in &action.guards {
            let _ = write!(
                out,
                " guard {} senses {};",
                guard.condition.display(names),
                guard.sensed.display(names)
            );
        }
        out.push_str(" }\n");
    }
    for init in &spec.initial_situations {
        let _ = write!(out, "init {} {{ pl={};", init.label, init.pl);
        write_assignments(&mut out, names, init.valuation);
        out.push_str(" }\n");
    }
    out.push_str("actual {");
    write_assignments(&mut out, names, spec.actual_initial);
    out.push_str(" }\n");
    if let Some(seq) = &spec.seq {
        if seq.is_empty() {
            out.push_str("seq;\n");
        } else {
            let _ = writeln!(out, "seq {};", seq.join(", "));
        }
    }
    out
}

fn write_assignments(out: &mut String, names: &[String], valuation: FluentValuation) {
    for (name, value) in valuation.named(names) {
        let _ = write!(out, " {name}={value};");
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_domain;
    use super::*;

    #[test]
    fn rooms_text_is_stable() {
        let spec = parse_domain(include_str!("../../data/rooms.dom")).unwrap();
        let text = serialize_domain(&spec);
        assert!(text.contains(
            "sense SL accuracy=0.9 { guard InR1 senses Light1; guard !InR1 senses Light2; }"
        ));
        assert!(text.contains("action Leave { InR1 := !InR1; }"));
        assert_eq!(parse_domain(&text).unwrap(), spec);
        assert_eq!(serialize_domain(&parse_domain(&text).unwrap()), text);
    }

    #[test]
    fn no_actions_round_trips() {
        let spec = parse_domain("fluent A; init S { pl=0; A=false; } actual { A=true; }").unwrap();
        assert!(spec.physical_actions.is_empty() && spec.sensing_actions.is_empty());
        assert_eq!(parse_domain(&serialize_domain(&spec)).unwrap(), spec);
    }

    #[test]
    fn full_accuracy_is_printed_and_preserved() {
        let spec =
            parse_domain("fluent A; sense S { guard true senses A; } actual { A=true; } seq;")
                .unwrap();
        let text = serialize_domain(&spec);
        assert!(text.contains("accuracy=1.0"));
        assert!(text.contains("seq;"));
        let back = parse_domain(&text).unwrap();
        assert_eq!(back.sensing_actions[0].accuracy, 1.0);
        assert_eq!(back, spec);
    }
}
