//! Instance file format and result files.
//!
//! # Instance format (`mo-gamma-sp v1`)
//!
//! Line-oriented text, integers only, `#` starts a comment anywhere on a
//! line, blank lines are ignored. The directives must appear in this order:
//!
//! ```text
//! mo-gamma-sp v1
//! k <objectives>
//! gamma <g_1> ... <g_k>
//! nodes <node count>
//! query <source> <target>
//! edge <tail> <head> <nominal_1> <delta_1> ... <nominal_k> <delta_k>
//! ```
//!
//! Each parse error carries the offending line number and a stable error
//! code (see [`ParseErrorKind::code`]).
//!
//! # Result format
//!
//! One CSV row per front entry with the fixed columns
//! `instance,algo,gamma,front_index,z_1..z_k,path,subproblems_considered,`
//! `subproblems_solved,labels_created,labels_permanent,micros`. `gamma` is
//! `;`-joined, `path` is the `-`-joined node sequence, count columns are
//! empty when the algorithm does not produce them. Given the same instance
//! and flags the output is byte-identical except for the `micros` column.

use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::model::{Cost, CostVector, Graph, Instance, ModelError, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected header `mo-gamma-sp v1`")]
    BadHeader,
    #[error("expected `{0}` directive")]
    ExpectedDirective(&'static str),
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("expected {expected} fields, got {got}")]
    WrongFieldCount { expected: usize, got: usize },
    #[error("`{0}` is not an integer in range")]
    BadInteger(String),
    #[error("k must be at least 1")]
    BadObjectiveCount,
    #[error("node count must be at least 1")]
    BadNodeCount,
    #[error("node {node} out of range (nodes = {node_count})")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("self-loop at node {0}; self-loops are not allowed")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1}); parallel edges are not allowed")]
    DuplicateEdge(NodeId, NodeId),
    #[error(
        "negative nominal cost {0}; costs must be conservative \
         (non-negative nominal and interval lengths)"
    )]
    NegativeNominal(Cost),
    #[error("negative interval length {0}; delta >= 0 is required")]
    NegativeDelta(Cost),
    #[error("gamma = {gamma} exceeds the number of edges ({edge_count})")]
    GammaOutOfRange { gamma: usize, edge_count: usize },
    #[error("instance is invalid: {0}")]
    Model(ModelError),
}

impl ParseErrorKind {
    /// Stable identifier for each rejection reason.
    pub fn code(&self) -> &'static str {
        match self {
            ParseErrorKind::BadHeader => "bad-header",
            ParseErrorKind::ExpectedDirective(_) => "missing-directive",
            ParseErrorKind::UnknownDirective(_) => "unknown-directive",
            ParseErrorKind::WrongFieldCount { .. } => "wrong-field-count",
            ParseErrorKind::BadInteger(_) => "bad-integer",
            ParseErrorKind::BadObjectiveCount => "bad-objective-count",
            ParseErrorKind::BadNodeCount => "bad-node-count",
            ParseErrorKind::NodeOutOfRange { .. } => "node-out-of-range",
            ParseErrorKind::SelfLoop(_) => "self-loop",
            ParseErrorKind::DuplicateEdge(..) => "duplicate-edge",
            ParseErrorKind::NegativeNominal(_) => "negative-nominal",
            ParseErrorKind::NegativeDelta(_) => "negative-delta",
            ParseErrorKind::GammaOutOfRange { .. } => "gamma-out-of-range",
            ParseErrorKind::Model(_) => "invalid-instance",
        }
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Parses the `mo-gamma-sp v1` text format.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    // (1-based line number, significant content)
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(idx, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            (idx + 1, body)
        })
        .filter(|(_, body)| !body.is_empty())
        .collect();
    let mut cursor = lines.into_iter();
    let last_line = text.lines().count();

    let (line, header) = cursor
        .next()
        .ok_or_else(|| err(last_line.max(1), ParseErrorKind::BadHeader))?;
    let header_fields: Vec<&str> = header.split_whitespace().collect();
    if header_fields != ["mo-gamma-sp", "v1"] {
        return Err(err(line, ParseErrorKind::BadHeader));
    }

    let (line, body) = expect_directive(&mut cursor, "k", last_line)?;
    let fields = split_fields(body, 2, line)?;
    let k: usize = parse_int(fields[1], line)?;
    if k == 0 {
        return Err(err(line, ParseErrorKind::BadObjectiveCount));
    }

    let (gamma_line, body) = expect_directive(&mut cursor, "gamma", last_line)?;
    let fields = split_fields(body, 1 + k, gamma_line)?;
    let gamma: Vec<usize> = fields[1..]
        .iter()
        .map(|f| parse_int(f, gamma_line))
        .collect::<Result<_, _>>()?;

    let (line, body) = expect_directive(&mut cursor, "nodes", last_line)?;
    let fields = split_fields(body, 2, line)?;
    let node_count: usize = parse_int(fields[1], line)?;
    if node_count == 0 {
        return Err(err(line, ParseErrorKind::BadNodeCount));
    }

    let (line, body) = expect_directive(&mut cursor, "query", last_line)?;
    let fields = split_fields(body, 3, line)?;
    let source: NodeId = parse_int(fields[1], line)?;
    let target: NodeId = parse_int(fields[2], line)?;
    for node in [source, target] {
        if node >= node_count {
            return Err(err(line, ParseErrorKind::NodeOutOfRange { node, node_count }));
        }
    }

    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut nominal: Vec<Vec<Cost>> = Vec::new();
    let mut delta: Vec<Vec<Cost>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, body) in cursor {
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields[0] != "edge" {
            return Err(err(line, ParseErrorKind::UnknownDirective(fields[0].into())));
        }
        let expected = 3 + 2 * k;
        if fields.len() != expected {
            return Err(err(
                line,
                ParseErrorKind::WrongFieldCount {
                    expected,
                    got: fields.len(),
                },
            ));
        }
        let tail: NodeId = parse_int(fields[1], line)?;
        let head: NodeId = parse_int(fields[2], line)?;
        for node in [tail, head] {
            if node >= node_count {
                return Err(err(line, ParseErrorKind::NodeOutOfRange { node, node_count }));
            }
        }
        if tail == head {
            return Err(err(line, ParseErrorKind::SelfLoop(tail)));
        }
        if !seen.insert((tail, head)) {
            return Err(err(line, ParseErrorKind::DuplicateEdge(tail, head)));
        }
        let mut nom = Vec::with_capacity(k);
        let mut del = Vec::with_capacity(k);
        for i in 0..k {
            let c: Cost = parse_int(fields[3 + 2 * i], line)?;
            let d: Cost = parse_int(fields[4 + 2 * i], line)?;
            if c < 0 {
                return Err(err(line, ParseErrorKind::NegativeNominal(c)));
            }
            if d < 0 {
                return Err(err(line, ParseErrorKind::NegativeDelta(d)));
            }
            nom.push(c);
            del.push(d);
        }
        edges.push((tail, head));
        nominal.push(nom);
        delta.push(del);
    }

    for &g in &gamma {
        if g > edges.len() {
            return Err(err(
                gamma_line,
                ParseErrorKind::GammaOutOfRange {
                    gamma: g,
                    edge_count: edges.len(),
                },
            ));
        }
    }

    let graph = Graph::new(node_count, edges)
        .map_err(|e| err(last_line.max(1), ParseErrorKind::Model(e)))?;
    Instance::new(graph, nominal, delta, gamma, source, target)
        .map_err(|e| err(last_line.max(1), ParseErrorKind::Model(e)))
}

fn expect_directive<'a>(
    cursor: &mut impl Iterator<Item = (usize, &'a str)>,
    name: &'static str,
    last_line: usize,
) -> Result<(usize, &'a str), ParseError> {
    let (line, body) = cursor
        .next()
        .ok_or_else(|| err(last_line.max(1), ParseErrorKind::ExpectedDirective(name)))?;
    if body.split_whitespace().next() != Some(name) {
        return Err(err(line, ParseErrorKind::ExpectedDirective(name)));
    }
    Ok((line, body))
}

fn split_fields(body: &str, expected: usize, line: usize) -> Result<Vec<&str>, ParseError> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != expected {
        return Err(err(
            line,
            ParseErrorKind::WrongFieldCount {
                expected,
                got: fields.len(),
            },
        ));
    }
    Ok(fields)
}

fn parse_int<T: std::str::FromStr>(token: &str, line: usize) -> Result<T, ParseError> {
    token
        .parse()
        .map_err(|_| err(line, ParseErrorKind::BadInteger(token.to_string())))
}

/// Canonical serialization; `parse_instance(serialize_instance(i))`
/// reconstructs an equal instance.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::from("mo-gamma-sp v1\n");
    let k = instance.objectives();
    out.push_str(&format!("k {k}\n"));
    out.push_str("gamma");
    for &g in instance.gamma() {
        out.push_str(&format!(" {g}"));
    }
    out.push('\n');
    out.push_str(&format!("nodes {}\n", instance.graph().node_count()));
    out.push_str(&format!(
        "query {} {}\n",
        instance.source(),
        instance.target()
    ));
    for (e, &(tail, head)) in instance.graph().edges().iter().enumerate() {
        out.push_str(&format!("edge {tail} {head}"));
        for i in 0..k {
            out.push_str(&format!(" {} {}", instance.nominal(e, i), instance.delta(e, i)));
        }
        out.push('\n');
    }
    out
}

/// Per-run counters; a solver fills only the counters it has.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub subproblems_considered: Option<usize>,
    pub subproblems_solved: Option<usize>,
    pub labels_created: Option<usize>,
    pub labels_permanent: Option<usize>,
}

/// One solver run ready to be written as CSV.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub instance: String,
    pub algo: String,
    pub gamma: Vec<usize>,
    /// Front entries: objective vector plus node sequence.
    pub front: Vec<(CostVector, Vec<NodeId>)>,
    pub stats: SolveStats,
    pub micros: u128,
}

#[derive(Debug, Error)]
pub enum ResultIoError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed result file: {0}")]
    Malformed(String),
}

fn join<T: fmt::Display>(values: &[T], sep: &str) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn opt_str(value: Option<usize>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes a result record as CSV. The front must satisfy the pairwise
/// non-dominance invariant; the record's objective count is taken from the
/// first front entry (an empty front writes only the header).
pub fn write_result_csv<W: Write>(writer: W, record: &ResultRecord) -> Result<(), ResultIoError> {
    let k = record.front.first().map(|(c, _)| c.dim()).unwrap_or(0);
    for (a, _) in &record.front {
        for (b, _) in &record.front {
            if a != b && a.weakly_dominates(b) {
                return Err(ResultIoError::Malformed(format!(
                    "front violates pairwise non-dominance: {a} vs {b}"
                )));
            }
        }
    }
    let mut csv_writer = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = vec![
        "instance".into(),
        "algo".into(),
        "gamma".into(),
        "front_index".into(),
    ];
    for i in 1..=k {
        header.push(format!("z_{i}"));
    }
    header.extend(
        [
            "path",
            "subproblems_considered",
            "subproblems_solved",
            "labels_created",
            "labels_permanent",
            "micros",
        ]
        .map(String::from),
    );
    csv_writer.write_record(&header)?;
    for (idx, (cost, nodes)) in record.front.iter().enumerate() {
        let mut row: Vec<String> = vec![
            record.instance.clone(),
            record.algo.clone(),
            join(&record.gamma, ";"),
            idx.to_string(),
        ];
        row.extend(cost.values().iter().map(|v| v.to_string()));
        row.push(join(nodes, "-"));
        row.push(opt_str(record.stats.subproblems_considered));
        row.push(opt_str(record.stats.subproblems_solved));
        row.push(opt_str(record.stats.labels_created));
        row.push(opt_str(record.stats.labels_permanent));
        row.push(record.micros.to_string());
        csv_writer.write_record(&row)?;
    }
    csv_writer.flush()?;
    Ok(())
}

/// Reads the objective vectors back out of a result CSV.
pub fn read_result_values<R: std::io::Read>(reader: R) -> Result<Vec<CostVector>, ResultIoError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let z_columns: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, name)| name.starts_with("z_"))
        .map(|(idx, _)| idx)
        .collect();
    let mut values = Vec::new();
    for row in csv_reader.records() {
        let row = row?;
        let mut vector = Vec::with_capacity(z_columns.len());
        for &col in &z_columns {
            let field = row
                .get(col)
                .ok_or_else(|| ResultIoError::Malformed("short row".into()))?;
            let value: Cost = field
                .parse()
                .map_err(|_| ResultIoError::Malformed(format!("bad objective value {field:?}")))?;
            vector.push(value);
        }
        values.push(CostVector(vector));
    }
    Ok(values)
}

/// Compares two result files by their objective-vector value sets. Returns
/// the vectors only in `a` and only in `b`; both empty means the fronts are
/// value-identical.
pub fn compare_values(a: &[CostVector], b: &[CostVector]) -> (Vec<CostVector>, Vec<CostVector>) {
    let set_a: std::collections::BTreeSet<_> = a.iter().cloned().collect();
    let set_b: std::collections::BTreeSet<_> = b.iter().cloned().collect();
    let only_a = set_a.difference(&set_b).cloned().collect();
    let only_b = set_b.difference(&set_a).cloned().collect();
    (only_a, only_b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nedge 0 1 3 2\n";

    #[test]
    fn parses_minimal_instance() {
        let instance = parse_instance(MINIMAL).unwrap();
        assert_eq!(instance.objectives(), 1);
        assert_eq!(instance.graph().edge_count(), 1);
        assert_eq!(instance.nominal(0, 0), 3);
        assert_eq!(instance.delta(0, 0), 2);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# instance\nmo-gamma-sp v1\n\nk 1 # one objective\ngamma 1\n\nnodes 2\nquery 0 1\nedge 0 1 3 2 # the only edge\n";
        let instance = parse_instance(text).unwrap();
        assert_eq!(instance.graph().edge_count(), 1);
    }

    #[test]
    fn round_trip_is_identity() {
        let instance = parse_instance(MINIMAL).unwrap();
        let text = serialize_instance(&instance);
        let reparsed = parse_instance(&text).unwrap();
        assert_eq!(instance, reparsed);
        assert_eq!(text, serialize_instance(&reparsed));
    }

    #[test]
    fn negative_delta_is_rejected_with_line_number() {
        let text = "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nedge 0 1 3 -2\n";
        let e = parse_instance(text).unwrap_err();
        assert_eq!(e.line, 6);
        assert_eq!(e.kind.code(), "negative-delta");
    }

    #[test]
    fn error_catalogue() {
        let cases: &[(&str, &str)] = &[
            ("nonsense\n", "bad-header"),
            ("mo-gamma-sp v2\nk 1\n", "bad-header"),
            ("mo-gamma-sp v1\ngamma 1\n", "missing-directive"),
            ("mo-gamma-sp v1\nk 0\ngamma\nnodes 2\nquery 0 1\n", "bad-objective-count"),
            ("mo-gamma-sp v1\nk one\n", "bad-integer"),
            ("mo-gamma-sp v1\nk 1\ngamma 1 2\nnodes 2\nquery 0 1\n", "wrong-field-count"),
            ("mo-gamma-sp v1\nk 1\ngamma 1\nnodes 0\nquery 0 1\n", "bad-node-count"),
            ("mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 5\n", "node-out-of-range"),
            (
                "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nedge 0 7 1 1\n",
                "node-out-of-range",
            ),
            (
                "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nedge 1 1 1 1\n",
                "self-loop",
            ),
            (
                "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nedge 0 1 1 1\nedge 0 1 2 2\n",
                "duplicate-edge",
            ),
            (
                "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nedge 0 1 -3 1\n",
                "negative-nominal",
            ),
            (
                "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nedge 0 1 3 -1\n",
                "negative-delta",
            ),
            (
                "mo-gamma-sp v1\nk 1\ngamma 9\nnodes 2\nquery 0 1\nedge 0 1 3 1\n",
                "gamma-out-of-range",
            ),
            (
                "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 2\nquery 0 1\nvertex 0\n",
                "unknown-directive",
            ),
        ];
        for (text, code) in cases {
            let e = parse_instance(text).unwrap_err();
            assert_eq!(e.kind.code(), *code, "input {text:?} gave {e}");
        }
    }

    #[test]
    fn conservative_diagnostic_mentions_assumption() {
        let text = "mo-gamma-sp v1\nk 1\ngamma 1\nnodes 3\nquery 0 2\nedge 0 1 1 1\nedge 1 2 -1 1\n";
        let e = parse_instance(text).unwrap_err();
        assert_eq!(e.kind.code(), "negative-nominal");
        assert!(e.to_string().contains("conservative"));
        assert_eq!(e.line, 7);
    }

    #[test]
    fn result_csv_round_trip_values() {
        let record = ResultRecord {
            instance: "demo".into(),
            algo: "lsa".into(),
            gamma: vec![2, 1],
            front: vec![
                (CostVector(vec![1, 9]), vec![0, 2, 3]),
                (CostVector(vec![5, 2]), vec![0, 1, 3]),
            ],
            stats: SolveStats {
                labels_created: Some(10),
                labels_permanent: Some(7),
                ..SolveStats::default()
            },
            micros: 42,
        };
        let mut buffer = Vec::new();
        write_result_csv(&mut buffer, &record).unwrap();
        let text = String::from_utf8(buffer.clone()).unwrap();
        assert!(text.starts_with(
            "instance,algo,gamma,front_index,z_1,z_2,path,subproblems_considered"
        ));
        assert!(text.contains("demo,lsa,2;1,0,1,9,0-2-3,,,10,7,42"));
        let values = read_result_values(buffer.as_slice()).unwrap();
        assert_eq!(values, vec![CostVector(vec![1, 9]), CostVector(vec![5, 2])]);
    }

    #[test]
    fn result_csv_rejects_dominated_front() {
        let record = ResultRecord {
            instance: "demo".into(),
            algo: "lsa".into(),
            gamma: vec![1],
            front: vec![
                (CostVector(vec![1, 1]), vec![0, 1]),
                (CostVector(vec![2, 2]), vec![0, 2]),
            ],
            stats: SolveStats::default(),
            micros: 0,
        };
        let mut buffer = Vec::new();
        assert!(write_result_csv(&mut buffer, &record).is_err());
    }

    #[test]
    fn compare_reports_symmetric_difference() {
        let a = vec![CostVector(vec![1, 2]), CostVector(vec![2, 1])];
        let b = vec![CostVector(vec![1, 2]), CostVector(vec![1, 3])];
        let (only_a, only_b) = compare_values(&a, &b);
        assert_eq!(only_a, vec![CostVector(vec![2, 1])]);
        assert_eq!(only_b, vec![CostVector(vec![1, 3])]);
        let (x, y) = compare_values(&a, &a);
        assert!(x.is_empty() && y.is_empty());
    }

    #[test]
    fn determinism_modulo_micros() {
        let record = |micros| ResultRecord {
            instance: "d".into(),
            algo: "dsa".into(),
            gamma: vec![1],
            front: vec![(CostVector(vec![3]), vec![0, 1])],
            stats: SolveStats::default(),
            micros,
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_result_csv(&mut a, &record(1)).unwrap();
        write_result_csv(&mut b, &record(2)).unwrap();
        let strip = |buf: &[u8]| {
            String::from_utf8(buf.to_vec())
                .unwrap()
                .lines()
                .map(|l| l.rsplit_once(',').unwrap().0.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
    }
}
