use std::fmt;

use super::{Formula, Target};

pub(super) fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Prop(p) => write!(out, "{p}"),
        Formula::Nominal(i) => write!(out, "#{i}"),
        Formula::SVar(x) => write!(out, "${x}"),
        Formula::Top => out.write_str("true"),
        Formula::Bottom => out.write_str("false"),
        Formula::Neg(a) => {
            out.write_str("!")?;
            write_formula(a, out)
        }
        Formula::And(a, b) => {
            out.write_str("(")?;
            write_formula(a, out)?;
            out.write_str(" & ")?;
            write_formula(b, out)?;
            out.write_str(")")
        }
        Formula::Or(a, b) => {
            out.write_str("(")?;
            write_formula(a, out)?;
            out.write_str(" | ")?;
            write_formula(b, out)?;
            out.write_str(")")
        }
        Formula::Diamond(a) => {
            out.write_str("<> ")?;
            write_formula(a, out)
        }
        Formula::Box(a) => {
            out.write_str("[] ")?;
            write_formula(a, out)
        }
        Formula::Down(x, a) => {
            write!(out, "down {x}. ")?;
            write_formula(a, out)
        }
        Formula::At(t, a) => {
            match t {
                Target::Nominal(i) => write!(out, "@#{i} ")?,
                Target::SVar(x) => write!(out, "@${x} ")?,
            }
            write_formula(a, out)
        }
    }
}
