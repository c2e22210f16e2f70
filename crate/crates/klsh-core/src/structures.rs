//! Classifiable structures (tuple paths and rooted labeled trees), labeled
//! corpora, token embeddings, and corpus ingestion / splitting.
//!
//! Corpus files are UTF-8 with one JSON record per line:
//!
//! ```text
//! {"label":0|1,"kind":"path"|"tree","tuples":[[edge,node],...]}
//! ```
//!
//! Tree records add `"children":[[...],...]`, one entry per tuple in tuple
//! order listing the indices of that node's children; node 0 is the root.
//! Blank lines and lines starting with `#` are skipped, which lets generators
//! record their parameters in a header line.
//!
//! Embedding files are whitespace-separated text, one `label v1 ... vd` per
//! line. Labels therefore cannot contain whitespace.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding;

const SALT_SPLIT: u64 = 0x5911;

/// One (edge-label, node-label) token. The edge label names the edge to the
/// parent (or the incoming edge along a path) and may be empty for roots and
/// plain tokens; the node label is never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenTuple {
    pub edge: String,
    pub node: String,
}

impl TokenTuple {
    pub fn new(edge: impl Into<String>, node: impl Into<String>) -> Self {
        TokenTuple {
            edge: edge.into(),
            node: node.into(),
        }
    }
}

/// A node of a rooted, ordered, labeled tree. Child order is meaningful and
/// is preserved from the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub tuple: TokenTuple,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(tuple: TokenTuple) -> Self {
        TreeNode {
            tuple,
            children: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(TreeNode::node_count).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructKind {
    Path,
    Tree,
}

impl StructKind {
    pub fn name(self) -> &'static str {
        match self {
            StructKind::Path => "path",
            StructKind::Tree => "tree",
        }
    }
}

impl fmt::Display for StructKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StructKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(StructKind::Path),
            "tree" => Ok(StructKind::Tree),
            other => Err(Error::invalid(format!("unknown structure kind `{other}`"))),
        }
    }
}

/// The unit being classified: an ordered sequence of tuples or a rooted tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Structure {
    Path(Vec<TokenTuple>),
    Tree(TreeNode),
}

impl Structure {
    pub fn kind(&self) -> StructKind {
        match self {
            Structure::Path(_) => StructKind::Path,
            Structure::Tree(_) => StructKind::Tree,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Structure::Path(t) => t.len(),
            Structure::Tree(root) => root.node_count(),
        }
    }

    /// All tuples in order (preorder for trees).
    pub fn tuples(&self) -> Vec<&TokenTuple> {
        match self {
            Structure::Path(t) => t.iter().collect(),
            Structure::Tree(root) => {
                let mut out = Vec::with_capacity(root.node_count());
                fn walk<'a>(n: &'a TreeNode, out: &mut Vec<&'a TokenTuple>) {
                    out.push(&n.tuple);
                    for c in &n.children {
                        walk(c, out);
                    }
                }
                walk(root, &mut out);
                out
            }
        }
    }

    /// Distinct edge labels, in first-appearance order.
    pub fn edge_labels(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for t in self.tuples() {
            if !seen.contains(&t.edge.as_str()) {
                seen.push(t.edge.as_str());
            }
        }
        seen
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Structure::Path(tuples) if tuples.is_empty() => {
                Err(Error::invalid("path structure must be non-empty"))
            }
            _ => {
                for t in self.tuples() {
                    if t.node.is_empty() {
                        return Err(Error::invalid("node label must be non-empty"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// A structure with its binary class label (`true` = valid/positive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub structure: Structure,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub id: String,
    pub examples: Vec<LabeledExample>,
}

impl Corpus {
    pub fn new(id: impl Into<String>, examples: Vec<LabeledExample>) -> Self {
        Corpus {
            id: id.into(),
            examples,
        }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.examples.iter().map(|e| e.label).collect()
    }

    /// The common variant of all examples; mixed corpora are rejected.
    pub fn kind(&self) -> Result<StructKind> {
        let mut kinds = self.examples.iter().map(|e| e.structure.kind());
        let first = kinds
            .next()
            .ok_or_else(|| Error::invalid("corpus is empty"))?;
        if kinds.all(|k| k == first) {
            Ok(first)
        } else {
            Err(Error::invalid("corpus mixes path and tree structures"))
        }
    }

    /// Distinct edge labels across the corpus, sorted.
    pub fn edge_vocabulary(&self) -> Vec<String> {
        let mut set: Vec<String> = Vec::new();
        for e in &self.examples {
            for l in e.structure.edge_labels() {
                if !set.iter().any(|s| s == l) {
                    set.push(l.to_string());
                }
            }
        }
        set.sort();
        set
    }
}

// ---------------------------------------------------------------------------
// Corpus line format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RecordWire {
    label: u8,
    kind: String,
    tuples: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<Vec<usize>>>,
}

fn tree_to_flat(root: &TreeNode) -> (Vec<(String, String)>, Vec<Vec<usize>>) {
    let mut tuples = Vec::new();
    let mut children = Vec::new();
    fn walk(n: &TreeNode, tuples: &mut Vec<(String, String)>, children: &mut Vec<Vec<usize>>) -> usize {
        let idx = tuples.len();
        tuples.push((n.tuple.edge.clone(), n.tuple.node.clone()));
        children.push(Vec::new());
        for c in &n.children {
            let ci = walk(c, tuples, children);
            children[idx].push(ci);
        }
        idx
    }
    walk(root, &mut tuples, &mut children);
    (tuples, children)
}

fn flat_to_tree(tuples: &[(String, String)], children: &[Vec<usize>]) -> Result<TreeNode> {
    let n = tuples.len();
    if n == 0 {
        return Err(Error::invalid("tree has no nodes"));
    }
    if children.len() != n {
        return Err(Error::invalid(format!(
            "children list length {} does not match tuple count {}",
            children.len(),
            n
        )));
    }
    let mut parent_count = vec![0usize; n];
    for (i, kids) in children.iter().enumerate() {
        for &c in kids {
            if c >= n {
                return Err(Error::invalid(format!("child index {c} out of range")));
            }
            if c == i {
                return Err(Error::invalid(format!("node {i} lists itself as a child")));
            }
            parent_count[c] += 1;
        }
    }
    if parent_count[0] != 0 {
        return Err(Error::invalid("node 0 must be the root (it has a parent)"));
    }
    for (i, &pc) in parent_count.iter().enumerate().skip(1) {
        if pc != 1 {
            return Err(Error::invalid(format!(
                "node {i} has {pc} parents; every non-root node needs exactly one"
            )));
        }
    }
    // Parent counts are consistent, so following children from the root
    // reaches every node exactly once unless a cycle is disconnected from it.
    fn build(
        i: usize,
        tuples: &[(String, String)],
        children: &[Vec<usize>],
        visited: &mut [bool],
    ) -> Result<TreeNode> {
        if visited[i] {
            return Err(Error::invalid("cycle detected in tree record"));
        }
        visited[i] = true;
        let mut node = TreeNode::leaf(TokenTuple::new(tuples[i].0.clone(), tuples[i].1.clone()));
        for &c in &children[i] {
            node.children.push(build(c, tuples, children, visited)?);
        }
        Ok(node)
    }
    let mut visited = vec![false; n];
    let root = build(0, tuples, children, &mut visited)?;
    if visited.iter().any(|v| !v) {
        return Err(Error::invalid("tree record is disconnected"));
    }
    Ok(root)
}

/// Renders one labeled example in the corpus line format.
pub fn example_to_line(example: &LabeledExample) -> String {
    let wire = match &example.structure {
        Structure::Path(tuples) => RecordWire {
            label: example.label as u8,
            kind: "path".into(),
            tuples: tuples
                .iter()
                .map(|t| (t.edge.clone(), t.node.clone()))
                .collect(),
            children: None,
        },
        Structure::Tree(root) => {
            let (tuples, children) = tree_to_flat(root);
            RecordWire {
                label: example.label as u8,
                kind: "tree".into(),
                tuples,
                children: Some(children),
            }
        }
    };
    serde_json::to_string(&wire).expect("record serialization cannot fail")
}

fn example_from_line(line: &str, lineno: usize) -> Result<LabeledExample> {
    let wire: RecordWire =
        serde_json::from_str(line).map_err(|e| Error::parse(lineno, e.to_string()))?;
    if wire.label > 1 {
        return Err(Error::parse(
            lineno,
            format!("label {} outside {{0,1}}", wire.label),
        ));
    }
    let structure = match wire.kind.as_str() {
        "path" => {
            if wire.children.is_some() {
                return Err(Error::parse(lineno, "path record cannot have children"));
            }
            Structure::Path(
                wire.tuples
                    .into_iter()
                    .map(|(e, n)| TokenTuple::new(e, n))
                    .collect(),
            )
        }
        "tree" => {
            let empty;
            let children = match &wire.children {
                Some(c) => c,
                None => {
                    // A childless record is only a valid tree when it has a
                    // single node.
                    empty = vec![Vec::new(); wire.tuples.len()];
                    &empty
                }
            };
            Structure::Tree(
                flat_to_tree(&wire.tuples, children)
                    .map_err(|e| Error::parse(lineno, e.to_string()))?,
            )
        }
        other => {
            return Err(Error::parse(
                lineno,
                format!("unknown variant tag `{other}`"),
            ))
        }
    };
    structure.validate().map_err(|e| match e {
        Error::Invalid(msg) => Error::parse(lineno, msg),
        e => e,
    })?;
    Ok(LabeledExample {
        structure,
        label: wire.label == 1,
    })
}

/// Loads a corpus from a newline-delimited record file. Line order is
/// preserved; blank lines and `#` comments are skipped.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    load_corpus_reader(BufReader::new(file), id)
}

pub fn load_corpus_reader(reader: impl BufRead, id: impl Into<String>) -> Result<Corpus> {
    let mut examples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        examples.push(example_from_line(trimmed, lineno)?);
    }
    if examples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(Corpus::new(id, examples))
}

/// Writes a corpus in the line format, optionally preceded by `#` header lines.
pub fn save_corpus(corpus: &Corpus, mut w: impl Write, header: Option<&str>) -> Result<()> {
    if let Some(h) = header {
        for line in h.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    for e in &corpus.examples {
        writeln!(w, "{}", example_to_line(e))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

/// Fixed-dimension real vectors per token label. Lookups of unknown labels
/// resolve to the zero vector and are counted, so a run can report how much
/// of its vocabulary was missing.
#[derive(Debug)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
    zero: Vec<f64>,
    oov: AtomicU64,
}

/// Serializable payload of an [`EmbeddingTable`] (counters excluded).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingData {
    pub dim: usize,
    pub vectors: BTreeMap<String, Vec<f64>>,
}

impl From<EmbeddingData> for EmbeddingTable {
    fn from(data: EmbeddingData) -> Self {
        EmbeddingTable {
            zero: vec![0.0; data.dim],
            dim: data.dim,
            vectors: data.vectors,
            oov: AtomicU64::new(0),
        }
    }
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: BTreeMap::new(),
            zero: vec![0.0; dim],
            oov: AtomicU64::new(0),
        }
    }

    pub fn insert(&mut self, label: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::invalid(format!(
                "embedding dimension {} does not match table dimension {}",
                vector.len(),
                self.dim
            )));
        }
        self.vectors.insert(label.into(), vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vector for `label`; unknown labels yield the zero vector and bump the
    /// out-of-vocabulary counter.
    pub fn lookup(&self, label: &str) -> &[f64] {
        match self.vectors.get(label) {
            Some(v) => v,
            None => {
                self.oov.fetch_add(1, Ordering::Relaxed);
                &self.zero
            }
        }
    }

    pub fn contains(&self, label: &str) -> bool {
        self.vectors.contains_key(label)
    }

    pub fn oov_count(&self) -> u64 {
        self.oov.load(Ordering::Relaxed)
    }

    pub fn to_data(&self) -> EmbeddingData {
        EmbeddingData {
            dim: self.dim,
            vectors: self.vectors.clone(),
        }
    }
}

/// Loads whitespace-separated embeddings (`label v1 ... vd` per line).
/// Duplicate labels keep the last occurrence and emit a warning.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let file = File::open(path.as_ref())?;
    load_embeddings_reader(BufReader::new(file))
}

pub fn load_embeddings_reader(reader: impl BufRead) -> Result<EmbeddingTable> {
    let mut dim: Option<usize> = None;
    let mut vectors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut duplicates = 0u64;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let label = parts.next().expect("non-empty line has a first token");
        let values: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("non-numeric component `{p}`")))
            })
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(Error::parse(lineno, "embedding has no components"));
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::parse(
                    lineno,
                    format!("dimension mismatch: expected {d}, got {}", values.len()),
                ));
            }
            _ => {}
        }
        if vectors.insert(label.to_string(), values).is_some() {
            duplicates += 1;
            log::warn!("duplicate embedding label `{label}` at line {lineno}; last occurrence wins");
        }
    }
    let dim = dim.ok_or_else(|| Error::invalid("empty embeddings file"))?;
    if duplicates > 0 {
        log::warn!("{duplicates} duplicate embedding label(s) replaced");
    }
    Ok(EmbeddingTable::from(EmbeddingData { dim, vectors }))
}

pub fn save_embeddings(table: &EmbeddingTable, mut w: impl Write) -> Result<()> {
    for (label, vec) in &table.to_data().vectors {
        let comps: Vec<String> = vec.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{label} {}", comps.join(" "))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

/// Splits off `round(fraction * n)` examples as a holdout, uniformly at
/// random. Both sides preserve corpus order and are disjoint.
pub fn split_corpus(corpus: &Corpus, fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    let n = corpus.len();
    if n < 2 {
        return Err(Error::invalid("corpus must have at least 2 examples to split"));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("split fraction must be in (0,1)"));
    }
    let holdout_n = (fraction * n as f64).round() as usize;
    if holdout_n == 0 || holdout_n == n {
        return Err(Error::invalid(format!(
            "fraction {fraction} produces an empty split side for n={n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seeding::stream(seed, &[SALT_SPLIT]));
    let mut holdout_idx: Vec<usize> = idx[..holdout_n].to_vec();
    let mut train_idx: Vec<usize> = idx[holdout_n..].to_vec();
    holdout_idx.sort_unstable();
    train_idx.sort_unstable();
    Ok((
        subset(corpus, &train_idx, "train"),
        subset(corpus, &holdout_idx, "holdout"),
    ))
}

/// Like [`split_corpus`] but samples the holdout per class, keeping class
/// ratios close to the full corpus.
pub fn split_corpus_stratified(corpus: &Corpus, fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    let n = corpus.len();
    if n < 2 {
        return Err(Error::invalid("corpus must have at least 2 examples to split"));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("split fraction must be in (0,1)"));
    }
    let mut holdout_idx = Vec::new();
    for class in [false, true] {
        let mut class_idx: Vec<usize> = (0..n).filter(|&i| corpus.examples[i].label == class).collect();
        let take = (fraction * class_idx.len() as f64).round() as usize;
        class_idx.shuffle(&mut seeding::stream(seed, &[SALT_SPLIT, class as u64 + 1]));
        holdout_idx.extend_from_slice(&class_idx[..take]);
    }
    if holdout_idx.is_empty() || holdout_idx.len() == n {
        return Err(Error::invalid(format!(
            "fraction {fraction} produces an empty split side for n={n}"
        )));
    }
    holdout_idx.sort_unstable();
    let train_idx: Vec<usize> = (0..n).filter(|i| holdout_idx.binary_search(i).is_err()).collect();
    Ok((
        subset(corpus, &train_idx, "train"),
        subset(corpus, &holdout_idx, "holdout"),
    ))
}

fn subset(corpus: &Corpus, idx: &[usize], tag: &str) -> Corpus {
    Corpus::new(
        format!("{}-{}", corpus.id, tag),
        idx.iter().map(|&i| corpus.examples[i].clone()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn corpus_of(lines: &str) -> Result<Corpus> {
        load_corpus_reader(Cursor::new(lines.to_string()), "test")
    }

    #[test]
    fn parses_the_documented_path_record() {
        let c = corpus_of(r#"{"label":1,"kind":"path","tuples":[["nsubj","Ras"],["dobj","activates"]]}"#)
            .unwrap();
        assert_eq!(c.len(), 1);
        let ex = &c.examples[0];
        assert!(ex.label);
        match &ex.structure {
            Structure::Path(t) => {
                assert_eq!(t.len(), 2);
                assert_eq!(t[0], TokenTuple::new("nsubj", "Ras"));
                assert_eq!(t[1], TokenTuple::new("dobj", "activates"));
            }
            _ => panic!("expected a path"),
        }
    }

    #[test]
    fn empty_file_is_an_empty_corpus_error() {
        match corpus_of("") {
            Err(Error::EmptyCorpus) => {}
            other => panic!("expected EmptyCorpus, got {other:?}"),
        }
        // A header-only file is still empty.
        match corpus_of("# generated\n\n") {
            Err(Error::EmptyCorpus) => {}
            other => panic!("expected EmptyCorpus, got {other:?}"),
        }
    }

    #[test]
    fn label_outside_binary_is_a_parse_error_with_line_number() {
        let lines = concat!(
            r#"{"label":1,"kind":"path","tuples":[["a","x"]]}"#,
            "\n",
            r#"{"label":2,"kind":"path","tuples":[["a","x"]]}"#,
        );
        match corpus_of(lines) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_variant_tag_is_rejected() {
        match corpus_of(r#"{"label":0,"kind":"graph","tuples":[["a","x"]]}"#) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("unknown variant tag")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn tree_records_round_trip() {
        let line = r#"{"label":1,"kind":"tree","tuples":[["","root"],["l","a"],["r","b"],["x","c"]],"children":[[1,2],[],[3],[]]}"#;
        let c = corpus_of(line).unwrap();
        let ex = &c.examples[0];
        match &ex.structure {
            Structure::Tree(root) => {
                assert_eq!(root.tuple, TokenTuple::new("", "root"));
                assert_eq!(root.children.len(), 2);
                assert_eq!(root.children[1].children[0].tuple, TokenTuple::new("x", "c"));
            }
            _ => panic!("expected a tree"),
        }
        let rendered = example_to_line(ex);
        let reparsed = corpus_of(&rendered).unwrap();
        assert_eq!(reparsed.examples[0], *ex);
    }

    #[test]
    fn malformed_trees_are_rejected() {
        // Two parents for node 2.
        let double_parent = r#"{"label":1,"kind":"tree","tuples":[["","r"],["a","x"],["b","y"]],"children":[[1,2],[2],[]]}"#;
        assert!(corpus_of(double_parent).is_err());
        // Root listed as a child.
        let root_child = r#"{"label":1,"kind":"tree","tuples":[["","r"],["a","x"]],"children":[[1],[0]]}"#;
        assert!(corpus_of(root_child).is_err());
        // Out of range child index.
        let oob = r#"{"label":1,"kind":"tree","tuples":[["","r"]],"children":[[5]]}"#;
        assert!(corpus_of(oob).is_err());
    }

    #[test]
    fn corpus_round_trips_through_save_and_load() {
        let lines = concat!(
            r#"{"label":1,"kind":"path","tuples":[["a","x"],["b","y"]]}"#,
            "\n",
            r#"{"label":0,"kind":"tree","tuples":[["","r"],["e","z"]],"children":[[1],[]]}"#,
        );
        let c = corpus_of(lines).unwrap();
        let mut buf = Vec::new();
        save_corpus(&c, &mut buf, Some("params here")).unwrap();
        let reloaded = load_corpus_reader(Cursor::new(buf), "test").unwrap();
        assert_eq!(reloaded.examples, c.examples);
    }

    #[test]
    fn embeddings_load_with_uniform_dimension() {
        let t = load_embeddings_reader(Cursor::new("a 0 1\nb 1 0\n")).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.lookup("a"), &[0.0, 1.0]);
    }

    #[test]
    fn ragged_embeddings_are_rejected() {
        match load_embeddings_reader(Cursor::new("a 0 1\nb 1 0 2\n")) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("dimension mismatch"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(load_embeddings_reader(Cursor::new("a 0 x\n")).is_err());
    }

    #[test]
    fn duplicate_embedding_labels_keep_the_last() {
        let t = load_embeddings_reader(Cursor::new("a 0 1\na 2 3\n")).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.lookup("a"), &[2.0, 3.0]);
    }

    #[test]
    fn oov_lookups_hit_the_zero_vector_and_are_counted() {
        let t = load_embeddings_reader(Cursor::new("a 1 2\n")).unwrap();
        assert_eq!(t.lookup("missing"), &[0.0, 0.0]);
        assert_eq!(t.lookup("gone"), &[0.0, 0.0]);
        assert_eq!(t.oov_count(), 2);
    }

    fn tiny_corpus(n: usize) -> Corpus {
        let examples = (0..n)
            .map(|i| LabeledExample {
                structure: Structure::Path(vec![TokenTuple::new("e", format!("w{i}"))]),
                label: i % 3 == 0,
            })
            .collect();
        Corpus::new("tiny", examples)
    }

    #[test]
    fn split_sizes_match_rounded_fraction() {
        let c = tiny_corpus(100);
        let (train, holdout) = split_corpus(&c, 0.1, 42).unwrap();
        assert_eq!(train.len(), 90);
        assert_eq!(holdout.len(), 10);

        let c2 = tiny_corpus(2);
        let (t2, h2) = split_corpus(&c2, 0.5, 1).unwrap();
        assert_eq!((t2.len(), h2.len()), (1, 1));
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let c = tiny_corpus(50);
        let (a1, b1) = split_corpus(&c, 0.2, 9).unwrap();
        let (a2, b2) = split_corpus(&c, 0.2, 9).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        let (_, b3) = split_corpus(&c, 0.2, 10).unwrap();
        assert!(b1 != b3 || b1.examples == b3.examples);
    }

    #[test]
    fn split_partitions_for_many_seeds() {
        let c = tiny_corpus(23);
        for seed in 0..100 {
            let (train, holdout) = split_corpus(&c, 0.3, seed).unwrap();
            assert_eq!(train.len() + holdout.len(), c.len());
            let mut all: Vec<String> = train
                .examples
                .iter()
                .chain(holdout.examples.iter())
                .map(|e| example_to_line(e))
                .collect();
            all.sort();
            let mut orig: Vec<String> = c.examples.iter().map(example_to_line).collect();
            orig.sort();
            assert_eq!(all, orig);
        }
    }

    #[test]
    fn degenerate_fractions_error() {
        let c = tiny_corpus(10);
        assert!(split_corpus(&c, 0.01, 1).is_err()); // rounds to 0
        assert!(split_corpus(&c, 0.999, 1).is_err()); // rounds to n
        assert!(split_corpus(&tiny_corpus(1), 0.5, 1).is_err());
    }

    #[test]
    fn stratified_split_keeps_class_ratio() {
        let c = tiny_corpus(90); // 30 positives
        let (_, holdout) = split_corpus_stratified(&c, 0.1, 5).unwrap();
        let pos = holdout.examples.iter().filter(|e| e.label).count();
        assert_eq!(holdout.len(), 9);
        assert_eq!(pos, 3);
    }
}
