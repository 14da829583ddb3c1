//! Small constructed embeddings that pin down a metric's extreme or blind-spot
//! behavior, together with the values the metrics must produce on them.
//!
//! A [`Witness`] is ordinary data: an embedding set, a word-set configuration
//! and named checks. Bundles can be written to disk and fed to the CLI or any
//! other tool.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::direct_bias::{bias_direction_mean, bias_direction_pca, direct_bias};
use crate::embedding_io::{
    load_embeddings, resolve, save_embeddings, write_atomically, EmbeddingSet, Format, ResolveMode, ResolvedSets,
    WordSetConfig,
};
use crate::error::{Error, Result};
use crate::mac::mac_score;
use crate::same::{same_set_binary, same_set_multi, same_skew, same_stereotype, StereotypeVariant};
use crate::similarity::attribute_mean;
use crate::vector::Vector;
use crate::weat::{associations, weat_effect_size, weat_test_statistic};

use std::io::Write as _;

/// How a bias direction is derived from the configured defining sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSource {
    /// Leading principal direction of the defining sets.
    Pca,
    /// Mean of the normalized differences of two-member defining sets.
    Mean,
}

/// A scalar quantity computed from a witness. Set fields name entries of the
/// witness configuration; lists of target sets are concatenated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum Probe {
    WeatEffectSize { x: String, y: String, a: String, b: String },
    WeatTestStatistic { x: String, y: String, a: String, b: String },
    WeatMaxAbsAssociation { targets: Vec<String>, a: String, b: String },
    WeatMinAbsAssociation { targets: Vec<String>, a: String, b: String },
    MacScore { targets: Vec<String>, attributes: Vec<String> },
    SameBinary { targets: Vec<String>, a_i: String, a_j: String },
    SameSkew { targets: Vec<String>, a_i: String, a_j: String },
    SameStereotype { targets: Vec<String>, a_i: String, a_j: String, variant: StereotypeVariant },
    /// Multi-attribute SAME; the first attribute set is the reference.
    SameMulti { targets: Vec<String>, attributes: Vec<String> },
    DirectBias { targets: Vec<String>, direction: DirectionSource, c: f64 },
    DirectionComponent { direction: DirectionSource, index: usize },
    /// `first - second`.
    Difference { first: Box<Probe>, second: Box<Probe> },
}

impl Probe {
    /// False for probes that read raw coordinates.
    pub fn frame_independent(&self) -> bool {
        match self {
            Probe::DirectionComponent { .. } => false,
            Probe::Difference { first, second } => first.frame_independent() && second.frame_independent(),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    Approx { value: f64, tol: f64 },
    /// The metric must refuse to produce a value (e.g. zero spread).
    Undefined,
    AtLeast { value: f64 },
    AtMost { value: f64 },
    Above { value: f64 },
}

impl Expectation {
    pub fn approx(value: f64, tol: f64) -> Self {
        Expectation::Approx { value, tol }
    }

    fn accepts(&self, observed: &Result<f64>) -> bool {
        match (self, observed) {
            (Expectation::Undefined, Err(e)) => is_undefined(e),
            (Expectation::Undefined, Ok(_)) | (_, Err(_)) => false,
            (Expectation::Approx { value, tol }, Ok(v)) => (v - value).abs() <= *tol,
            (Expectation::AtLeast { value }, Ok(v)) => v >= value,
            (Expectation::AtMost { value }, Ok(v)) => v <= value,
            (Expectation::Above { value }, Ok(v)) => v > value,
        }
    }
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Approx { value, tol } => write!(f, "== {value} ± {tol:e}"),
            Expectation::Undefined => write!(f, "undefined"),
            Expectation::AtLeast { value } => write!(f, ">= {value}"),
            Expectation::AtMost { value } => write!(f, "<= {value}"),
            Expectation::Above { value } => write!(f, "> {value}"),
        }
    }
}

fn is_undefined(e: &Error) -> bool {
    matches!(
        e,
        Error::UndefinedEffectSize | Error::IdenticalAttributeMeans | Error::DegenerateMean | Error::DegenerateStdDev
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub probe: Probe,
    pub expect: Expectation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub expected: String,
    /// `None` when the metric returned an error (including "undefined").
    pub observed: Option<f64>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub name: String,
    pub embeddings: EmbeddingSet,
    pub word_sets: WordSetConfig,
    pub expected: BTreeMap<String, Check>,
    /// Where the construction comes from, in words.
    pub provenance: String,
}

#[derive(Serialize, Deserialize)]
struct ExpectedFile {
    name: String,
    provenance: String,
    checks: BTreeMap<String, Check>,
}

const EMBEDDINGS_FILE: &str = "embeddings.txt";

impl Witness {
    /// Evaluates every check, in name order.
    pub fn evaluate(&self) -> Result<Vec<CheckOutcome>> {
        let sets = resolve(&self.word_sets, &self.embeddings, ResolveMode::Strict)?;
        Ok(self
            .expected
            .iter()
            .map(|(name, check)| {
                let observed = evaluate_probe(&check.probe, &sets);
                CheckOutcome {
                    name: name.clone(),
                    expected: check.expect.to_string(),
                    passed: check.expect.accepts(&observed),
                    error: observed.as_ref().err().map(|e| e.to_string()),
                    observed: observed.ok(),
                }
            })
            .collect())
    }

    pub fn passes(&self) -> Result<bool> {
        Ok(self.evaluate()?.iter().all(|o| o.passed))
    }

    /// Applies `matrix` (rows of the linear map) and a positive scale to every
    /// vector. Checks on raw coordinates are dropped since they only hold in
    /// the original frame.
    pub fn transformed(&self, matrix: &[Vec<f64>], scale: f64) -> Result<Witness> {
        Ok(Witness {
            embeddings: self.embeddings.map_vectors(|v| v.transform(matrix).scale(scale))?,
            expected: self
                .expected
                .iter()
                .filter(|(_, c)| c.probe.frame_independent())
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
            ..self.clone()
        })
    }

    /// Writes `embeddings.txt`, `config.json`, `expected.json`, one token-list
    /// file per attribute and target set under `sets/`, and `defining_sets.json`.
    pub fn write_bundle(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir.join("sets"))
            .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        save_embeddings(&self.embeddings, &dir.join(EMBEDDINGS_FILE), Format::Word2vecText)?;
        self.word_sets.save(&dir.join("config.json"))?;
        let expected = ExpectedFile {
            name: self.name.clone(),
            provenance: self.provenance.clone(),
            checks: self.expected.clone(),
        };
        let json = serde_json::to_string_pretty(&expected)?;
        write_atomically(&dir.join("expected.json"), |w| writeln!(w, "{json}"))?;
        for (name, tokens) in self.word_sets.attribute_sets.iter().chain(&self.word_sets.target_sets) {
            let path = dir.join("sets").join(format!("{name}.txt"));
            write_atomically(&path, |w| tokens.iter().try_for_each(|t| writeln!(w, "{t}")))?;
        }
        if !self.word_sets.defining_sets.is_empty() {
            let json = serde_json::to_string_pretty(&self.word_sets.defining_sets)?;
            write_atomically(&dir.join("defining_sets.json"), |w| writeln!(w, "{json}"))?;
        }
        Ok(())
    }

    pub fn read_bundle(dir: &Path) -> Result<Witness> {
        let embeddings = load_embeddings(&dir.join(EMBEDDINGS_FILE), Format::Word2vecText)?;
        let word_sets = WordSetConfig::load(&dir.join("config.json"))?;
        let path = dir.join("expected.json");
        let text =
            std::fs::read_to_string(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let expected: ExpectedFile = serde_json::from_str(&text)?;
        Ok(Witness {
            name: expected.name,
            embeddings,
            word_sets,
            expected: expected.checks,
            provenance: expected.provenance,
        })
    }
}

fn targets(sets: &ResolvedSets, names: &[String]) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for name in names {
        out.extend(sets.target(name)?.vectors.iter().cloned());
    }
    Ok(out)
}

fn attr<'a>(sets: &'a ResolvedSets, name: &str) -> Result<&'a [Vector]> {
    Ok(&sets.attribute(name)?.vectors)
}

fn direction(sets: &ResolvedSets, source: DirectionSource) -> Result<Vector> {
    let defining = sets.defining_vectors();
    match source {
        DirectionSource::Pca => Ok(bias_direction_pca(&defining, 1)?.basis.remove(0)),
        DirectionSource::Mean => bias_direction_mean(&defining_pairs(&defining)?),
    }
}

/// Two-member defining sets as `(first, second)` pairs.
pub fn defining_pairs(defining: &[Vec<Vector>]) -> Result<Vec<(Vector, Vector)>> {
    defining
        .iter()
        .map(|d| match d.as_slice() {
            [u, v] => Ok((u.clone(), v.clone())),
            _ => Err(Error::InvalidParameters(format!(
                "mean direction needs two-member defining sets, got {} members",
                d.len()
            ))),
        })
        .collect()
}

pub fn evaluate_probe(probe: &Probe, sets: &ResolvedSets) -> Result<f64> {
    match probe {
        Probe::WeatEffectSize { x, y, a, b } => weat_effect_size(
            &sets.target(x)?.vectors,
            &sets.target(y)?.vectors,
            attr(sets, a)?,
            attr(sets, b)?,
        ),
        Probe::WeatTestStatistic { x, y, a, b } => weat_test_statistic(
            &sets.target(x)?.vectors,
            &sets.target(y)?.vectors,
            attr(sets, a)?,
            attr(sets, b)?,
        ),
        Probe::WeatMaxAbsAssociation { targets: t, a, b } => {
            let s = associations(&targets(sets, t)?, attr(sets, a)?, attr(sets, b)?)?;
            Ok(s.iter().fold(0.0, |m, v| m.max(v.abs())))
        }
        Probe::WeatMinAbsAssociation { targets: t, a, b } => {
            let s = associations(&targets(sets, t)?, attr(sets, a)?, attr(sets, b)?)?;
            Ok(s.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())))
        }
        Probe::MacScore { targets: t, attributes } => {
            let attrs = attributes.iter().map(|n| attr(sets, n)).collect::<Result<Vec<_>>>()?;
            Ok(mac_score(&targets(sets, t)?, &attrs)?.score)
        }
        Probe::SameBinary { targets: t, a_i, a_j } => {
            Ok(same_set_binary(&targets(sets, t)?, attr(sets, a_i)?, attr(sets, a_j)?)?.set_score)
        }
        Probe::SameSkew { targets: t, a_i, a_j } => same_skew(&targets(sets, t)?, attr(sets, a_i)?, attr(sets, a_j)?),
        Probe::SameStereotype { targets: t, a_i, a_j, variant } => {
            same_stereotype(&targets(sets, t)?, attr(sets, a_i)?, attr(sets, a_j)?, *variant)
        }
        Probe::SameMulti { targets: t, attributes } => {
            let attrs = attributes.iter().map(|n| attr(sets, n)).collect::<Result<Vec<_>>>()?;
            Ok(same_set_multi(&targets(sets, t)?, &attrs)?.set_score)
        }
        Probe::DirectBias { targets: t, direction: source, c } => {
            direct_bias(&targets(sets, t)?, &direction(sets, *source)?, *c)
        }
        Probe::DirectionComponent { direction: source, index } => {
            let g = direction(sets, *source)?;
            g.as_slice()
                .get(*index)
                .copied()
                .ok_or_else(|| Error::InvalidParameters(format!("component {index} out of range")))
        }
        Probe::Difference { first, second } => Ok(evaluate_probe(first, sets)? - evaluate_probe(second, sets)?),
    }
}

struct Builder {
    entries: Vec<(String, Vector)>,
    config: WordSetConfig,
    checks: BTreeMap<String, Check>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            entries: Vec::new(),
            config: WordSetConfig::default(),
            checks: BTreeMap::new(),
        }
    }

    fn tokens(&mut self, prefix: &str, vectors: &[Vector]) -> Vec<String> {
        vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let token = format!("{prefix}{i}");
                self.entries.push((token.clone(), v.clone()));
                token
            })
            .collect()
    }

    fn attribute(&mut self, name: &str, vectors: &[Vector]) -> &mut Self {
        let tokens = self.tokens(&format!("{name}_"), vectors);
        self.config.attribute_sets.insert(name.into(), tokens);
        self
    }

    fn target(&mut self, name: &str, vectors: &[Vector]) -> &mut Self {
        let tokens = self.tokens(&format!("{name}_"), vectors);
        self.config.target_sets.insert(name.into(), tokens);
        self
    }

    fn defining(&mut self, name: &str, vectors: &[Vector]) -> &mut Self {
        let tokens = self.tokens(&format!("{name}_"), vectors);
        self.config.defining_sets.insert(name.into(), tokens);
        self
    }

    fn check(&mut self, name: &str, probe: Probe, expect: Expectation) -> &mut Self {
        self.checks.insert(name.into(), Check { probe, expect });
        self
    }

    fn build(&mut self, name: &str, provenance: &str) -> Result<Witness> {
        Ok(Witness {
            name: name.into(),
            embeddings: EmbeddingSet::from_entries(name, std::mem::take(&mut self.entries))?,
            word_sets: std::mem::take(&mut self.config),
            expected: std::mem::take(&mut self.checks),
            provenance: provenance.into(),
        })
    }
}

fn s(name: &str) -> String {
    name.to_owned()
}

fn v(c: &[f64]) -> Vector {
    Vector::from_slice(c)
}

fn weat_probe(x: &str, y: &str) -> Probe {
    Probe::WeatEffectSize {
        x: s(x),
        y: s(y),
        a: s("a"),
        b: s("b"),
    }
}

/// `m` copies of `unit(â_A - â_B)` against `m` copies of its negation: the
/// effect size reaches its maximum of 2.
pub fn witness_weat_extremal(m: usize, a: &[Vector], b: &[Vector]) -> Result<Witness> {
    if m == 0 {
        return Err(Error::EmptyTargetSet);
    }
    let diff = &attribute_mean(a)?.vector - &attribute_mean(b)?.vector;
    let u = diff.normalized().map_err(|_| Error::IdenticalAttributeMeans)?;
    let neg = -&u;
    Builder::new()
        .attribute("a", a)
        .attribute("b", b)
        .target("x", &vec![u; m])
        .target("y", &vec![neg; m])
        .check("weat_effect_size", weat_probe("x", "y"), Expectation::approx(2.0, 1e-9))
        .check(
            "same_binary",
            Probe::SameBinary {
                targets: vec![s("x"), s("y")],
                a_i: s("a"),
                a_j: s("b"),
            },
            Expectation::approx(1.0, 1e-9),
        )
        .build(
            "weat_extremal",
            "targets placed on the unit difference of the attribute means and its negation",
        )
}

/// Two words with association 1 whose difference is orthogonal to `a - b`,
/// paired with fillers of association -1: WEAT's effect size is 0 although
/// every word is maximally associated.
pub fn witness_weat_blindspot() -> Result<Witness> {
    let targets = || vec![s("x"), s("y")];
    Builder::new()
        .attribute("a", &[v(&[1.0, 0.0])])
        .attribute("b", &[v(&[0.0, 1.0])])
        .target("x", &[v(&[1.0, 0.0]), v(&[0.0, 1.0])])
        .target("y", &[v(&[0.0, -1.0]), v(&[-1.0, 0.0])])
        .check("weat_effect_size", weat_probe("x", "y"), Expectation::approx(0.0, 1e-9))
        .check(
            "weat_max_abs_association",
            Probe::WeatMaxAbsAssociation {
                targets: targets(),
                a: s("a"),
                b: s("b"),
            },
            Expectation::approx(1.0, 1e-12),
        )
        .check(
            "weat_min_abs_association",
            Probe::WeatMinAbsAssociation {
                targets: targets(),
                a: s("a"),
                b: s("b"),
            },
            Expectation::approx(1.0, 1e-12),
        )
        .check(
            "same_binary",
            Probe::SameBinary {
                targets: targets(),
                a_i: s("a"),
                a_j: s("b"),
            },
            Expectation::AtLeast { value: 0.7 },
        )
        .build(
            "weat_blindspot",
            "associated words whose difference is orthogonal to the attribute difference",
        )
}

/// Antipodal attributes make MAC exactly 1 for a target at any angle `alpha`,
/// while SAME reports `|cos(alpha)|`.
pub fn witness_mac_blindspot(alpha: f64) -> Result<Witness> {
    let targets = || vec![s("t")];
    let attributes = vec![s("a1"), s("a2")];
    Builder::new()
        .attribute("a1", &[v(&[1.0, 0.0])])
        .attribute("a2", &[v(&[-1.0, 0.0])])
        .target("t", &[v(&[alpha.cos(), alpha.sin()])])
        .check(
            "mac_score",
            Probe::MacScore {
                targets: targets(),
                attributes,
            },
            Expectation::approx(1.0, 1e-12),
        )
        .check(
            "same_binary",
            Probe::SameBinary {
                targets: targets(),
                a_i: s("a1"),
                a_j: s("a2"),
            },
            Expectation::approx(alpha.cos().abs(), 1e-12),
        )
        .build("mac_blindspot", "antipodal attribute pair, symmetric cosine distances")
}

/// Defining pairs `±(-x, rx)` and `±(-x, -rx)`: their leading principal
/// direction is `(0, 1)`, so a word along `(0, 1)` scores the maximal Direct
/// Bias of 1 and the axis word `(1, 0)` scores 0. The mean pair difference
/// points along the x axis and ranks the two words the other way round.
pub fn witness_direct_bias_failure(r: f64, x: f64) -> Result<Witness> {
    if !(r.is_finite() && x.is_finite() && r > 1.0 && x > 0.0) {
        return Err(Error::InvalidParameters(format!("need r > 1 and x > 0, got r={r}, x={x}")));
    }
    let a1 = v(&[-x, r * x]);
    let a2 = v(&[-x, -r * x]);
    let db = |targets: &str, direction| Probe::DirectBias {
        targets: vec![s(targets)],
        direction,
        c: 1.0,
    };
    Builder::new()
        .defining("d1", &[a1.clone(), -&a1])
        .defining("d2", &[a2.clone(), -&a2])
        .target("neutral", &[v(&[0.0, 1.0])])
        .target("axis", &[v(&[1.0, 0.0])])
        .check(
            "pca_direction_x",
            Probe::DirectionComponent {
                direction: DirectionSource::Pca,
                index: 0,
            },
            Expectation::approx(0.0, 1e-9),
        )
        .check(
            "pca_direction_y",
            Probe::DirectionComponent {
                direction: DirectionSource::Pca,
                index: 1,
            },
            Expectation::approx(1.0, 1e-9),
        )
        .check("pca_neutral", db("neutral", DirectionSource::Pca), Expectation::approx(1.0, 1e-9))
        .check("pca_axis", db("axis", DirectionSource::Pca), Expectation::approx(0.0, 1e-9))
        .check("mean_neutral", db("neutral", DirectionSource::Mean), Expectation::approx(0.0, 1e-9))
        .check("mean_axis", db("axis", DirectionSource::Mean), Expectation::approx(1.0, 1e-9))
        .build(
            "direct_bias_failure",
            "defining pairs whose spread along y exceeds their shared x offset",
        )
}

/// Unit word in the plane whose association against `a = (1,0)`, `b = (0,1)`
/// equals `value` (which must lie in `[-√2, √2]`).
pub fn word_with_association(value: f64) -> Vector {
    let t = (value / SQRT_2).clamp(-1.0, 1.0).acos() - FRAC_PI_4;
    v(&[t.cos(), t.sin()])
}

fn planted(values: &[f64]) -> Vec<Vector> {
    values.iter().map(|&c| word_with_association(c)).collect()
}

/// Closed-form effect size of associations `(c1, c2 | -c1, -c2)`.
fn mirrored_effect_size(c1: f64, c2: f64) -> f64 {
    (c1 + c2) / ((c1 * c1 + c2 * c2) / 2.0).sqrt()
}

/// Replacing a moderate target word by a more extreme one raises the spread
/// of associations within the groups and lowers the effect size, even though
/// every association moves away from zero.
pub fn witness_variance_collapse() -> Result<Witness> {
    let (before, after) = ((0.9, 0.8), (0.9, 1.4));
    let min_abs = |x: &str, y: &str| Probe::WeatMinAbsAssociation {
        targets: vec![s(x), s(y)],
        a: s("a"),
        b: s("b"),
    };
    Builder::new()
        .attribute("a", &[v(&[1.0, 0.0])])
        .attribute("b", &[v(&[0.0, 1.0])])
        .target("x_before", &planted(&[before.0, before.1]))
        .target("y_before", &planted(&[-before.0, -before.1]))
        .target("x_after", &planted(&[after.0, after.1]))
        .target("y_after", &planted(&[-after.0, -after.1]))
        .target("x_flat", &planted(&[0.9, 0.9]))
        .target("y_flat", &planted(&[-0.9, -0.9]))
        .target("x_equal", &planted(&[0.5, 0.5]))
        .target("y_equal", &planted(&[0.5, 0.5]))
        .check(
            "effect_size_before",
            weat_probe("x_before", "y_before"),
            Expectation::approx(mirrored_effect_size(before.0, before.1), 1e-9),
        )
        .check(
            "effect_size_after",
            weat_probe("x_after", "y_after"),
            Expectation::approx(mirrored_effect_size(after.0, after.1), 1e-9),
        )
        .check(
            "effect_size_drop",
            Probe::Difference {
                first: Box::new(weat_probe("x_before", "y_before")),
                second: Box::new(weat_probe("x_after", "y_after")),
            },
            Expectation::Above { value: 0.0 },
        )
        .check(
            "min_association_gain",
            Probe::Difference {
                first: Box::new(min_abs("x_after", "y_after")),
                second: Box::new(min_abs("x_before", "y_before")),
            },
            Expectation::Above { value: 0.0 },
        )
        .check(
            "effect_size_zero_spread",
            weat_probe("x_flat", "y_flat"),
            Expectation::approx(2.0, 1e-9),
        )
        .check("effect_size_all_equal", weat_probe("x_equal", "y_equal"), Expectation::Undefined)
        .build(
            "variance_collapse",
            "planted associations where a more extreme word lowers the effect size",
        )
}

/// Three attribute means at 0°, 90° and 180° with the word on the reference
/// mean: the multi-attribute score is `1/√2 + 1/2 ≈ 1.2071`, above 1.
pub fn witness_same_multi_above_one() -> Result<Witness> {
    let attributes = vec![s("a0"), s("a1"), s("a2")];
    let probe = Probe::SameMulti {
        targets: vec![s("w")],
        attributes,
    };
    Builder::new()
        .attribute("a0", &[v(&[1.0, 0.0])])
        .attribute("a1", &[v(&[0.0, 1.0])])
        .attribute("a2", &[v(&[-1.0, 0.0])])
        .target("w", &[v(&[1.0, 0.0])])
        .check("same_multi", probe.clone(), Expectation::approx(1.2071067811865475, 1e-9))
        .check("same_multi_exceeds_one", probe, Expectation::Above { value: 1.0 })
        .build(
            "same_multi_above_one",
            "hand-built multi-attribute configuration exceeding the stated upper bound of 1",
        )
}

/// A target set shifted uniformly toward one pole (pure skew) and one split
/// symmetrically between the poles (pure stereotype).
pub fn witness_skew_stereotype() -> Result<Witness> {
    let probe_targets = |t: &str| vec![s(t)];
    let skew = |t: &str| Probe::SameSkew {
        targets: probe_targets(t),
        a_i: s("a"),
        a_j: s("b"),
    };
    let stereo = |t: &str, variant| Probe::SameStereotype {
        targets: probe_targets(t),
        a_i: s("a"),
        a_j: s("b"),
        variant,
    };
    let mut b = Builder::new();
    b.attribute("a", &[v(&[1.0, 0.0])])
        .attribute("b", &[v(&[0.0, 1.0])])
        .target("shifted", &[v(&[1.0, 0.0]), v(&[3.0, 0.0]), v(&[0.5, 0.0])])
        .target("split", &[v(&[1.0, 0.0]), v(&[0.0, 1.0])])
        .check("skew_shifted", skew("shifted"), Expectation::AtLeast { value: 0.5 })
        .check("skew_split", skew("split"), Expectation::approx(0.0, 1e-12));
    for (label, variant) in [
        ("as_written", StereotypeVariant::AsWritten),
        ("population_std", StereotypeVariant::PopulationStd),
    ] {
        b.check(
            &format!("stereotype_shifted_{label}"),
            stereo("shifted", variant),
            Expectation::approx(0.0, 1e-12),
        )
        .check(
            &format!("stereotype_split_{label}"),
            stereo("split", variant),
            Expectation::Above { value: 0.0 },
        );
    }
    b.build(
        "skew_stereotype",
        "uniformly shifted target set versus symmetrically split target set",
    )
}

/// Every witness with its default parameters.
pub fn all_witnesses() -> Result<Vec<Witness>> {
    Ok(vec![
        witness_weat_extremal(2, &[v(&[1.0, 0.0])], &[v(&[0.0, 1.0])])?,
        witness_weat_blindspot()?,
        witness_mac_blindspot(0.3)?,
        witness_direct_bias_failure(2.0, 1.0)?,
        witness_variance_collapse()?,
        witness_same_multi_above_one()?,
        witness_skew_stereotype()?,
    ])
}
