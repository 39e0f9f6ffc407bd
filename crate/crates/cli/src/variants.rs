//! Named variants: each fixes a container, a selection operator and, where
//! the operator needs one, the score it ranks by.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// The generic container-plus-selector loop.
    Qd,
    /// Novelty Search with Local Competition.
    Nslc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variant {
    pub name: &'static str,
    pub algorithm: Algorithm,
    pub container: &'static str,
    /// `--selector` value; `None` for NSLC, which has its own ranking.
    pub selector: Option<&'static str>,
    pub score: Option<&'static str>,
    /// Part of the headline comparison.
    pub headline: bool,
    pub related: &'static str,
}

const fn qd(
    name: &'static str,
    container: &'static str,
    selector: &'static str,
    score: Option<&'static str>,
    headline: bool,
    related: &'static str,
) -> Variant {
    Variant {
        name,
        algorithm: Algorithm::Qd,
        container,
        selector: Some(selector),
        score,
        headline,
        related,
    }
}

pub const VARIANTS: [Variant; 19] = [
    qd("arch_no_selection", "archive", "none", None, true, "random search / motor babbling"),
    qd("arch_random", "archive", "uniform", None, true, ""),
    qd("arch_pareto", "archive", "pareto", None, true, ""),
    qd("arch_fitness", "archive", "score", Some("fitness"), false, ""),
    qd("arch_novelty", "archive", "score", Some("novelty"), false, "MAP-Elites with novelty"),
    qd("arch_curiosity", "archive", "score", Some("curiosity"), true, ""),
    qd("arch_pop_fitness", "archive", "population", Some("fitness"), true, "traditional EA"),
    qd("arch_pop_novelty", "archive", "population", Some("novelty"), false, "novelty search"),
    qd("arch_pop_curiosity", "archive", "population", Some("curiosity"), false, ""),
    qd("grid_no_selection", "grid", "none", None, true, "random search / motor babbling"),
    qd("grid_random", "grid", "uniform", None, true, "MAP-Elites"),
    qd("grid_pareto", "grid", "pareto", None, true, ""),
    qd("grid_fitness", "grid", "score", Some("fitness"), false, ""),
    qd("grid_novelty", "grid", "score", Some("novelty"), false, ""),
    qd("grid_curiosity", "grid", "score", Some("curiosity"), true, ""),
    qd("grid_pop_fitness", "grid", "population", Some("fitness"), true, "traditional EA"),
    qd("grid_pop_novelty", "grid", "population", Some("novelty"), false, ""),
    qd("grid_pop_curiosity", "grid", "population", Some("curiosity"), false, ""),
    Variant {
        name: "nslc",
        algorithm: Algorithm::Nslc,
        container: "grid",
        selector: None,
        score: None,
        headline: true,
        related: "novelty search with local competition",
    },
];

pub fn lookup(name: &str) -> Option<&'static Variant> {
    VARIANTS.iter().find(|v| v.name == name)
}

/// The variant a plain generic-loop configuration corresponds to.
pub fn identify(container: &str, selector: &str, score: Option<&str>) -> Option<&'static Variant> {
    VARIANTS.iter().find(|v| {
        v.algorithm == Algorithm::Qd
            && v.container == container
            && v.selector == Some(selector)
            && v.score == score
    })
}

impl Variant {
    /// Equivalent command-line flags.
    pub fn flags(&self) -> String {
        match self.algorithm {
            Algorithm::Nslc => "--variant nslc".to_string(),
            Algorithm::Qd => {
                let mut f = format!(
                    "--container {} --selector {}",
                    self.container,
                    self.selector.unwrap_or_default()
                );
                if let Some(score) = self.score {
                    f.push_str(&format!(" --score {score}"));
                }
                f
            }
        }
    }
}

/// Markdown table of every variant and its flags.
pub struct VariantTable;

impl fmt::Display for VariantTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "| Variant | Flags | Headline | Related approach |")?;
        writeln!(f, "|---|---|---|---|")?;
        for v in &VARIANTS {
            writeln!(
                f,
                "| `{}` | `{}` | {} | {} |",
                v.name,
                v.flags(),
                if v.headline { "yes" } else { "" },
                v.related
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_identifiable() {
        for v in &VARIANTS {
            assert_eq!(lookup(v.name), Some(v));
            if let (Algorithm::Qd, Some(sel)) = (v.algorithm, v.selector) {
                assert_eq!(identify(v.container, sel, v.score), Some(v));
            }
        }
        assert_eq!(VARIANTS.iter().filter(|v| v.headline).count(), 11);
    }

    #[test]
    fn map_elites_is_grid_with_uniform_selection() {
        let v = lookup("grid_random").unwrap();
        assert_eq!(v.flags(), "--container grid --selector uniform");
        assert_eq!(
            lookup("arch_pop_novelty").unwrap().flags(),
            "--container archive --selector population --score novelty"
        );
    }
}
