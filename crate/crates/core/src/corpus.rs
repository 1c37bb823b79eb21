//! The embedded example corpus and reference outputs.

use crate::format::{parse_system, ParseError};
use crate::system::System;

macro_rules! embed {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/", $name, ".ctrs")))),*]
    };
}

macro_rules! embed_golden {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/golden/", $name, ".trs")))),*]
    };
}

/// Corpus systems by name.
pub const SYSTEMS: &[(&str, &str)] = embed!(
    "R0", "R1", "R2", "R3", "R3p", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R10quad", "R10p", "R10inv", "R11",
    "R12", "R12p", "R20",
);

/// Reference outputs by name.
pub const GOLDEN: &[(&str, &str)] = embed_golden!(
    "U_R2", "Uopt_R2", "UJ_R12", "UN_R12p", "UN_R3p", "U_R3p", "Norm_R12", "R8inv", "Uopt_R8inv", "U_R8inv",
    "SR_R6", "SR_R7",
);

pub fn names() -> impl Iterator<Item = &'static str> {
    SYSTEMS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    SYSTEMS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a corpus system; panics only if the embedded text is malformed.
pub fn load(name: &str) -> Option<System> {
    source(name).map(|s| parse_system(s).unwrap_or_else(|e| panic!("corpus {name}: {e}")).with_origin(name))
}

pub fn golden(name: &str) -> Option<Result<System, ParseError>> {
    GOLDEN.iter().find(|(n, _)| *n == name).map(|(_, s)| parse_system(s))
}

/// How each reference output is produced from the corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoldenRecipe {
    U,
    Uopt,
    Uj,
    Un,
    Norm,
    Invert,
    Sr,
}

/// (golden name, source system, recipe)
pub const GOLDEN_RECIPES: &[(&str, &str, GoldenRecipe)] = &[
    ("U_R2", "R2", GoldenRecipe::U),
    ("Uopt_R2", "R2", GoldenRecipe::Uopt),
    ("UJ_R12", "R12", GoldenRecipe::Uj),
    ("UN_R12p", "R12p", GoldenRecipe::Un),
    ("UN_R3p", "R3p", GoldenRecipe::Un),
    ("U_R3p", "R3p", GoldenRecipe::U),
    ("Norm_R12", "R12", GoldenRecipe::Norm),
    ("R8inv", "R8", GoldenRecipe::Invert),
    ("Uopt_R8inv", "R8inv", GoldenRecipe::Uopt),
    ("U_R8inv", "R8inv", GoldenRecipe::U),
    ("SR_R6", "R6", GoldenRecipe::Sr),
    ("SR_R7", "R7", GoldenRecipe::Sr),
];

/// Source system for a recipe; `R8inv` is derived by inversion.
pub fn recipe_input(name: &str) -> Option<System> {
    if name == "R8inv" {
        return load("R8")?.invert().ok();
    }
    load(name)
}

/// Computes the output a golden file records.
pub fn compute(recipe: GoldenRecipe, input: &System) -> Result<System, String> {
    use crate::unravel::*;
    let e = |x: &dyn std::fmt::Display| x.to_string();
    match recipe {
        GoldenRecipe::U => unravel_u(input).map_err(|x| e(&x)),
        GoldenRecipe::Uopt => unravel_uopt(input).map_err(|x| e(&x)),
        GoldenRecipe::Uj => unravel_uj(input).map_err(|x| e(&x)),
        GoldenRecipe::Un => unravel_un(input).map_err(|x| e(&x)),
        GoldenRecipe::Norm => crate::homo::norm_transform(input).map_err(|x| e(&x)),
        GoldenRecipe::Invert => input.invert().map_err(|x| e(&x)),
        GoldenRecipe::Sr => crate::sr::sr_transform(input).map(|(s, _)| s).map_err(|x| e(&x)),
    }
}

/// Outcome of comparing one computed output with its golden file.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub equal: bool,
    pub detail: String,
}

/// Compares every golden file with the computed output, modulo variable renaming and
/// renaming of generated symbols.
pub fn check_goldens() -> Vec<GoldenCheck> {
    GOLDEN_RECIPES
        .iter()
        .map(|&(name, input, recipe)| {
            let res = (|| -> Result<(), String> {
                let want = golden(name).ok_or("missing golden")?.map_err(|e| e.to_string())?;
                let src = recipe_input(input).ok_or("missing input")?;
                let got = compute(recipe, &src)?;
                if crate::alpha::alpha_u_equal(&got, &want) {
                    Ok(())
                } else {
                    let miss = crate::alpha::missing_modulo_vars(&got, &want);
                    Err(format!("{} computed rules without a golden counterpart", miss.len()))
                }
            })();
            GoldenCheck { name: name.to_string(), equal: res.is_ok(), detail: res.err().unwrap_or_default() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse() {
        for n in names() {
            assert!(load(n).is_some(), "{n}");
        }
        for (n, _) in GOLDEN {
            golden(n).unwrap().unwrap_or_else(|e| panic!("{n}: {e}"));
        }
    }

    #[test]
    fn goldens_match() {
        for c in check_goldens() {
            assert!(c.equal, "{}: {}", c.name, c.detail);
        }
    }
}
