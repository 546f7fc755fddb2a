//! Food catalog: items, categories, units and per-unit calories.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Environment variable that points at a custom catalog file.
pub const CATALOG_ENV: &str = "FOODCAL_CATALOG";

/// Number of items in the shipped catalog.
pub const DEFAULT_ITEM_COUNT: usize = 72;

const DEFAULT_CATALOG_JSON: &str = include_str!("../data/catalog.json");
const DEFAULT_SOURCE_VERSION: &str = "builtin-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoodCategory {
    Rice,
    Bread,
    Curry,
    Fruit,
    Dessert,
    Dairy,
    Other,
}

impl FoodCategory {
    pub const ALL: [FoodCategory; 7] = [
        FoodCategory::Rice,
        FoodCategory::Bread,
        FoodCategory::Curry,
        FoodCategory::Fruit,
        FoodCategory::Dessert,
        FoodCategory::Dairy,
        FoodCategory::Other,
    ];

    /// Item count per category in the shipped catalog.
    pub fn default_count(self) -> usize {
        match self {
            FoodCategory::Rice => 8,
            FoodCategory::Bread => 5,
            FoodCategory::Curry => 32,
            FoodCategory::Fruit => 11,
            FoodCategory::Dessert => 6,
            FoodCategory::Dairy => 4,
            FoodCategory::Other => 6,
        }
    }

    pub fn is_staple(self) -> bool {
        matches!(self, FoodCategory::Rice | FoodCategory::Bread)
    }
}

impl fmt::Display for FoodCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FoodCategory::Rice => "Rice",
            FoodCategory::Bread => "Bread",
            FoodCategory::Curry => "Curry",
            FoodCategory::Fruit => "Fruit",
            FoodCategory::Dessert => "Dessert",
            FoodCategory::Dairy => "Dairy",
            FoodCategory::Other => "Other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementUnit {
    #[serde(rename = "g100")]
    Grams100,
    #[serde(rename = "piece")]
    Piece,
    #[serde(rename = "glass")]
    Glass,
    #[serde(rename = "cup")]
    Cup,
}

impl MeasurementUnit {
    pub const ALL: [MeasurementUnit; 4] = [
        MeasurementUnit::Grams100,
        MeasurementUnit::Piece,
        MeasurementUnit::Glass,
        MeasurementUnit::Cup,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MeasurementUnit::Grams100 => "100 g",
            MeasurementUnit::Piece => "piece",
            MeasurementUnit::Glass => "glass",
            MeasurementUnit::Cup => "cup",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoodItem {
    pub id: String,
    #[serde(rename = "name")]
    pub display_name: String,
    pub category: FoodCategory,
    pub unit: MeasurementUnit,
    pub kcal_per_unit: u32,
}

/// How strictly [`validate_catalog`] checks a catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValidationMode {
    /// Shipped-catalog rules: 72 items with the fixed per-category counts.
    #[default]
    Strict,
    /// Custom catalogs: only id uniqueness and positive calories.
    Lenient,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed catalog: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid catalog: {}", .0.join("; "))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub items: Vec<FoodItem>,
    pub source_version: String,
}

impl Catalog {
    /// The shipped 72-item catalog. Calorie values are configuration.
    pub fn builtin() -> Catalog {
        Catalog::from_json_str(DEFAULT_CATALOG_JSON, DEFAULT_SOURCE_VERSION, ValidationMode::Strict)
            .expect("builtin catalog is valid")
    }

    /// Loads from `$FOODCAL_CATALOG` (lenient rules) when set, otherwise the builtin.
    pub fn from_env() -> Result<Catalog, CatalogError> {
        match std::env::var_os(CATALOG_ENV) {
            Some(path) => load_catalog_with(Path::new(&path), ValidationMode::Lenient),
            None => Ok(Catalog::builtin()),
        }
    }

    pub fn from_json_str(
        json: &str,
        source_version: &str,
        mode: ValidationMode,
    ) -> Result<Catalog, CatalogError> {
        let items: Vec<FoodItem> = serde_json::from_str(json)?;
        let catalog = Catalog {
            items,
            source_version: source_version.to_string(),
        };
        let violations = validate_catalog(&catalog, mode);
        if violations.is_empty() {
            Ok(catalog)
        } else {
            Err(CatalogError::Validation(violations))
        }
    }

    pub fn get(&self, id: &str) -> Option<&FoodItem> {
        self.items.iter().find(|item| item.id == id)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn count(&self, category: FoodCategory) -> usize {
        self.items.iter().filter(|i| i.category == category).count()
    }

    /// Debug writer; the output reloads to the same item list.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.items).expect("catalog items serialize")
    }
}

/// Loads and strictly validates a catalog file.
pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    load_catalog_with(path, ValidationMode::Strict)
}

pub fn load_catalog_with(path: &Path, mode: ValidationMode) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Catalog::from_json_str(&text, &path.display().to_string(), mode)
}

pub fn save_catalog(catalog: &Catalog, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, catalog.to_json())
}

/// Returns every violated constraint; an empty list means the catalog is valid.
pub fn validate_catalog(catalog: &Catalog, mode: ValidationMode) -> Vec<String> {
    let mut violations = Vec::new();

    let mut seen = HashSet::new();
    for item in &catalog.items {
        if !seen.insert(item.id.as_str()) {
            violations.push(format!("duplicate item id \"{}\"", item.id));
        }
        if item.kcal_per_unit == 0 {
            violations.push(format!("item \"{}\" has kcal_per_unit 0", item.id));
        }
    }

    if mode == ValidationMode::Strict {
        if catalog.items.len() != DEFAULT_ITEM_COUNT {
            violations.push(format!(
                "item count {} ≠ {}",
                catalog.items.len(),
                DEFAULT_ITEM_COUNT
            ));
        }
        for category in FoodCategory::ALL {
            let (have, want) = (catalog.count(category), category.default_count());
            if have != want {
                violations.push(format!("{category} count {have} ≠ {want}"));
            }
        }
    }

    violations
}

pub fn items_by_category(catalog: &Catalog, category: FoodCategory) -> Vec<&FoodItem> {
    catalog
        .items
        .iter()
        .filter(|item| item.category == category)
        .collect()
}
