//! Room metadata ingestion from CSV and the id join against SVG elements.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::svg::{local_part, ElementNode, FloorplanDocument};

/// Header columns, in canonical order.
pub const CSV_COLUMNS: [&str; 6] = [
    "element_id",
    "name",
    "category",
    "department",
    "description",
    "tags",
];
const REQUIRED_COLUMNS: [&str; 3] = ["element_id", "name", "category"];

const ALIASES_JSON: &str = include_str!("../config/category_aliases.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Retail,
    Toilet,
    AccessibleToilet,
    Elevator,
    Stairs,
    Ramp,
    Entrance,
    AccessibleEntrance,
    Exit,
    InformationDesk,
    Corridor,
    Parking,
    Other,
}

impl Category {
    pub const ALL: [Category; 13] = [
        Category::Retail,
        Category::Toilet,
        Category::AccessibleToilet,
        Category::Elevator,
        Category::Stairs,
        Category::Ramp,
        Category::Entrance,
        Category::AccessibleEntrance,
        Category::Exit,
        Category::InformationDesk,
        Category::Corridor,
        Category::Parking,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Retail => "retail",
            Category::Toilet => "toilet",
            Category::AccessibleToilet => "accessible_toilet",
            Category::Elevator => "elevator",
            Category::Stairs => "stairs",
            Category::Ramp => "ramp",
            Category::Entrance => "entrance",
            Category::AccessibleEntrance => "accessible_entrance",
            Category::Exit => "exit",
            Category::InformationDesk => "information_desk",
            Category::Corridor => "corridor",
            Category::Parking => "parking",
            Category::Other => "other",
        }
    }

    /// Human-readable form used in generated descriptions.
    pub fn label(self) -> String {
        self.as_str().replace('_', " ")
    }

    /// Resolves free-form input through the vocabulary and then the alias table.
    pub fn normalize(raw: &str) -> Option<Category> {
        let key = normalize_key(raw);
        if let Ok(c) = key.parse() {
            return Some(c);
        }
        aliases().get(key.as_str()).copied()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    /// Exact vocabulary match only; see [`Category::normalize`] for aliases.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

fn normalize_key(raw: &str) -> String {
    raw.trim()
        .to_lowercase()
        .split(|c: char| c.is_whitespace() || c == '-' || c == '_')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

/// The committed alias table (lower-case alias → category).
pub fn aliases() -> &'static BTreeMap<String, Category> {
    static TABLE: OnceLock<BTreeMap<String, Category>> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(ALIASES_JSON).expect("bundled alias table is valid"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataRecord {
    pub element_id: String,
    pub name: String,
    pub category: Category,
    pub department: Option<String>,
    pub description: Option<String>,
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetadataWarning {
    UnknownCategory {
        row: usize,
        element_id: String,
        value: String,
    },
}

impl fmt::Display for MetadataWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetadataWarning::UnknownCategory {
                row,
                element_id,
                value,
            } => write!(
                f,
                "row {row} ({element_id}): unknown category `{value}`, using `other`"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataTable {
    pub records: Vec<MetadataRecord>,
    pub warnings: Vec<MetadataWarning>,
}

impl MetadataTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum MetadataError {
    #[error("metadata CSV is missing required column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: element_id is empty")]
    EmptyElementId { row: usize },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Parses the room metadata CSV. Rows are numbered by file line (header is row 1).
pub fn parse_metadata_csv(bytes: &[u8]) -> Result<MetadataTable, MetadataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    for required in REQUIRED_COLUMNS {
        if column(required).is_none() {
            return Err(MetadataError::MissingColumn(required.to_string()));
        }
    }
    let [id_col, name_col, cat_col] = REQUIRED_COLUMNS.map(|c| column(c).unwrap());
    let dept_col = column("department");
    let desc_col = column("description");
    let tags_col = column("tags");

    let mut table = MetadataTable::default();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 2;
        let row = row?;
        let field = |c: usize| row.get(c).unwrap_or("");
        let optional =
            |c: Option<usize>| c.map(field).filter(|v| !v.is_empty()).map(str::to_string);

        let element_id = field(id_col).to_string();
        if element_id.is_empty() {
            return Err(MetadataError::EmptyElementId { row: row_no });
        }
        let raw_category = field(cat_col);
        let category = Category::normalize(raw_category).unwrap_or_else(|| {
            table.warnings.push(MetadataWarning::UnknownCategory {
                row: row_no,
                element_id: element_id.clone(),
                value: raw_category.to_string(),
            });
            Category::Other
        });
        let tags = tags_col
            .map(field)
            .unwrap_or("")
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();

        table.records.push(MetadataRecord {
            element_id,
            name: field(name_col).to_string(),
            category,
            department: optional(dept_col),
            description: optional(desc_col),
            tags,
        });
    }
    Ok(table)
}

/// Tags that can carry room metadata.
const CANDIDATE_TAGS: &[&str] = &[
    "path", "rect", "circle", "ellipse", "polygon", "polyline", "line", "g", "use", "image", "text",
];
/// Subtrees that are never rendered directly.
const NON_RENDERED_CONTAINERS: &[&str] =
    &["defs", "clipPath", "mask", "pattern", "symbol", "marker"];

/// Elements eligible for the metadata join, in document order.
pub fn candidate_elements(doc: &FloorplanDocument) -> Vec<&ElementNode> {
    fn walk<'a>(el: &'a ElementNode, out: &mut Vec<&'a ElementNode>) {
        for child in el.child_elements() {
            let local = local_part(&child.tag);
            if NON_RENDERED_CONTAINERS.contains(&local) {
                continue;
            }
            if CANDIDATE_TAGS.contains(&local) && child.id().is_some_and(|id| !id.is_empty()) {
                out.push(child);
            }
            walk(child, out);
        }
    }
    let mut out = Vec::new();
    walk(doc.root(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedElement {
    /// Id as it appears in the document.
    pub element_id: String,
    pub record: MetadataRecord,
    pub case_insensitive: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub matched: Vec<MatchedElement>,
    pub unmatched_records: Vec<MetadataRecord>,
    pub unmatched_candidate_elements: Vec<String>,
}

/// Joins records to candidate elements on id: exact match first, then
/// case-insensitive. Each element is claimed by at most one record.
pub fn match_metadata(doc: &FloorplanDocument, table: &MetadataTable) -> MatchResult {
    let candidates: Vec<&str> = candidate_elements(doc)
        .into_iter()
        .filter_map(ElementNode::id)
        .collect();
    let exact: BTreeSet<&str> = candidates.iter().copied().collect();
    let mut folded: HashMap<String, Vec<&str>> = HashMap::new();
    for id in &candidates {
        folded.entry(id.to_lowercase()).or_default().push(id);
    }

    let mut claimed: BTreeSet<&str> = BTreeSet::new();
    let mut result = MatchResult::default();
    for record in &table.records {
        let hit = exact
            .get(record.element_id.as_str())
            .copied()
            .filter(|id| !claimed.contains(id))
            .map(|id| (id, false))
            .or_else(|| {
                folded
                    .get(&record.element_id.to_lowercase())?
                    .iter()
                    .copied()
                    .find(|id| !claimed.contains(id))
                    .map(|id| (id, true))
            });
        match hit {
            Some((id, case_insensitive)) => {
                claimed.insert(id);
                result.matched.push(MatchedElement {
                    element_id: id.to_string(),
                    record: record.clone(),
                    case_insensitive,
                });
            }
            None => result.unmatched_records.push(record.clone()),
        }
    }
    let mut seen = BTreeSet::new();
    result.unmatched_candidate_elements = candidates
        .into_iter()
        .filter(|id| !claimed.contains(id) && seen.insert(*id))
        .map(str::to_string)
        .collect();
    result
}
