//! HTTP JSON service for the FoodCalorie engine.

pub mod error;

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, Method};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::Value;
use tower_http::cors::{AllowOrigin, CorsLayer};

use foodcal_core::levelgen::{self, LevelGenConfig};
use foodcal_core::scoring::{self, ProfileSummary};
use foodcal_core::solver::{self, DayPlan};
use foodcal_core::store::{self, PlayerToken, ProfileStore};
use foodcal_core::{Catalog, CalorieRequirementTable, Gender, Level, LevelResult, ScoringConfig, SelectionConstraints, Submission};

pub use error::{ApiError, ErrorCode};

/// Conflicting writes are retried this many times before a 409.
pub const CAS_RETRIES: u32 = 3;

#[derive(Debug, Clone)]
pub struct ServerOptions {
    pub master_seed: u64,
    pub hints_enabled: bool,
    pub cors_origin: Option<String>,
    pub levelgen: LevelGenConfig,
    pub scoring: ScoringConfig,
}

impl Default for ServerOptions {
    fn default() -> Self {
        let levelgen = LevelGenConfig::default();
        Self {
            master_seed: 0,
            hints_enabled: true,
            cors_origin: None,
            scoring: ScoringConfig {
                constraints: levelgen.constraints,
                ..ScoringConfig::default()
            },
            levelgen,
        }
    }
}

impl ServerOptions {
    /// Uses `c` both for generating levels and for judging submissions.
    pub fn with_constraints(mut self, c: SelectionConstraints) -> Self {
        self.levelgen.constraints = c;
        self.scoring.constraints = c;
        self
    }
}

struct Inner {
    catalog: Catalog,
    reqs: CalorieRequirementTable,
    levels: Vec<Level>,
    store: Arc<dyn ProfileStore>,
    options: ServerOptions,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// Generates every level up front from the master seed.
    pub fn new(
        catalog: Catalog,
        reqs: CalorieRequirementTable,
        store: Arc<dyn ProfileStore>,
        options: ServerOptions,
    ) -> Result<AppState, levelgen::LevelGenError> {
        let levels = levelgen::generate_all_levels(&catalog, &reqs, options.master_seed, &options.levelgen)?;
        Ok(AppState(Arc::new(Inner {
            catalog,
            reqs,
            levels,
            store,
            options,
        })))
    }

    pub fn levels(&self) -> &[Level] {
        &self.0.levels
    }

    pub fn options(&self) -> &ServerOptions {
        &self.0.options
    }

    fn level(&self, raw: &str) -> Result<&Level, ApiError> {
        raw.parse::<usize>()
            .ok()
            .and_then(|n| n.checked_sub(1))
            .and_then(|i| self.0.levels.get(i))
            .ok_or_else(|| ApiError::not_found(format!("no level {raw}")))
    }

    async fn blocking<T, F>(&self, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&dyn ProfileStore) -> Result<T, ApiError> + Send + 'static,
    {
        let store = self.0.store.clone();
        tokio::task::spawn_blocking(move || f(store.as_ref()))
            .await
            .map_err(|_| ApiError::new(ErrorCode::StorageUnavailable, "storage task failed"))?
    }

    /// Resolves the bearer token to a known player.
    async fn authenticate(&self, headers: &HeaderMap) -> Result<PlayerToken, ApiError> {
        let token = headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .and_then(|v| PlayerToken::parse(v.trim()))
            .ok_or_else(ApiError::unknown_token)?;
        let probe = token.clone();
        self.blocking(move |s| s.get_profile(&probe).map_err(ApiError::from)).await?;
        Ok(token)
    }
}

#[derive(Debug, Serialize)]
pub struct TokenResponse {
    pub token: String,
}

#[derive(Debug, Serialize)]
pub struct ProfileView {
    #[serde(flatten)]
    pub summary: ProfileSummary,
    pub tried: Vec<u32>,
    pub passed: Vec<u32>,
    pub attempt_counts: std::collections::BTreeMap<u32, u32>,
    pub best_stars: std::collections::BTreeMap<u32, u32>,
}

impl ProfileView {
    fn new(profile: &foodcal_core::PlayerProfile, total_levels: u32) -> Self {
        Self {
            summary: scoring::profile_summary(profile, total_levels),
            tried: profile.levels_tried.iter().copied().collect(),
            passed: profile.levels_passed.iter().copied().collect(),
            attempt_counts: profile.attempt_counts.clone(),
            best_stars: profile.best_stars.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SubmitResponse {
    #[serde(flatten)]
    pub result: LevelResult,
    pub profile: ProfileView,
}

#[derive(Debug, Serialize)]
pub struct HintResponse {
    pub level: u32,
    pub gender: Gender,
    pub required_kcal: u32,
    pub plan: DayPlan,
    pub projected_stars: u8,
}

#[derive(Debug, Serialize)]
pub struct MetaResponse {
    pub level_count: usize,
    pub age_min: u32,
    pub age_max: u32,
    pub pass_threshold: u32,
    pub constraints: SelectionConstraints,
    pub hints_enabled: bool,
}

async fn anonymous(State(state): State<AppState>) -> Result<Json<TokenResponse>, ApiError> {
    let token = state
        .blocking(|s| s.create_anonymous_player().map_err(ApiError::from))
        .await?;
    Ok(Json(TokenResponse {
        token: token.as_str().to_string(),
    }))
}

async fn get_level(
    State(state): State<AppState>,
    Path(n): Path<String>,
    headers: HeaderMap,
) -> Result<Json<Level>, ApiError> {
    state.authenticate(&headers).await?;
    Ok(Json(state.level(&n)?.clone()))
}

async fn submit(
    State(state): State<AppState>,
    Path(n): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<SubmitResponse>, ApiError> {
    let token = state.authenticate(&headers).await?;
    let level = state.level(&n)?.clone();
    let mut value: Value =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))?;
    if let Value::Object(map) = &mut value {
        map.entry("level").or_insert(level.level_number.into());
    }
    let submission: Submission =
        serde_json::from_value(value).map_err(|e| ApiError::bad_request(format!("invalid submission: {e}")))?;

    let inner = state.0.clone();
    let total = inner.levels.len() as u32;
    let (result, stored) = state
        .blocking(move |s| {
            let outcome = store::update_profile(s, &token, CAS_RETRIES, |profile| {
                scoring::evaluate_submission(&level, &submission, profile, &inner.catalog, &inner.options.scoring)
            })?;
            Ok(outcome?)
        })
        .await?;
    Ok(Json(SubmitResponse {
        result,
        profile: ProfileView::new(&stored.profile, total),
    }))
}

async fn get_profile(State(state): State<AppState>, headers: HeaderMap) -> Result<Json<ProfileView>, ApiError> {
    let token = state.authenticate(&headers).await?;
    let stored = state
        .blocking(move |s| s.get_profile(&token).map_err(ApiError::from))
        .await?;
    Ok(Json(ProfileView::new(&stored.profile, state.levels().len() as u32)))
}

async fn hint(
    State(state): State<AppState>,
    Path(n): Path<String>,
    Query(query): Query<HashMap<String, String>>,
    headers: HeaderMap,
) -> Result<Json<HintResponse>, ApiError> {
    state.authenticate(&headers).await?;
    if !state.options().hints_enabled {
        return Err(ApiError::not_found("hints are disabled"));
    }
    let level = state.level(&n)?;
    let gender: Gender = query
        .get("gender")
        .ok_or_else(|| ApiError::bad_request("missing gender parameter"))?
        .parse()
        .map_err(|_| ApiError::bad_request("gender must be male or female"))?;
    let pools = level
        .pools(&state.0.catalog, gender)
        .map_err(|e| ApiError::new(ErrorCode::StorageUnavailable, e))?;
    let [b, l, d] = &pools;
    let required = level.target(gender);
    let plan = solver::best_plan([b, l, d], &state.options().scoring.constraints, required)
        .map_err(|e| ApiError::not_found(e.to_string()))?;
    let projected_stars = state.options().scoring.bands.stars(plan.day_total_kcal, required);
    Ok(Json(HintResponse {
        level: level.level_number,
        gender,
        required_kcal: required,
        plan,
        projected_stars,
    }))
}

async fn catalog(State(state): State<AppState>) -> Json<Vec<foodcal_core::FoodItem>> {
    Json(state.0.catalog.items.clone())
}

async fn meta(State(state): State<AppState>) -> Json<MetaResponse> {
    let o = state.options();
    Json(MetaResponse {
        level_count: state.levels().len(),
        age_min: state.0.reqs.age_min(),
        age_max: state.0.reqs.age_max(),
        pass_threshold: o.scoring.pass_threshold,
        constraints: o.scoring.constraints,
        hints_enabled: o.hints_enabled,
    })
}

async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

async fn method_not_allowed() -> ApiError {
    let mut e = ApiError::bad_request("method not allowed");
    e.http_status = axum::http::StatusCode::METHOD_NOT_ALLOWED;
    e
}

fn cors(origin: Option<&str>) -> CorsLayer {
    let allow = match origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::AUTHORIZATION, header::CONTENT_TYPE])
}

pub fn router(state: AppState) -> Router {
    let cors = cors(state.options().cors_origin.as_deref());
    Router::new()
        .route("/v1/auth/anonymous", post(anonymous))
        .route("/v1/levels/{n}", get(get_level))
        .route("/v1/levels/{n}/submit", post(submit))
        .route("/v1/levels/{n}/hint", get(hint))
        .route("/v1/profile", get(get_profile))
        .route("/v1/catalog", get(catalog))
        .route("/v1/meta", get(meta))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed)
        .layer(cors)
        .with_state(state)
}

/// Serves until the listener fails or the future is dropped.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
