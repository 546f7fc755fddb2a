//! Starts a live server on a loopback port and talks to it over HTTP.

#![allow(dead_code)]

use std::sync::Arc;

use foodcal_api::{AppState, ServerOptions};
use foodcal_core::store::{MemoryStore, ProfileStore};
use foodcal_core::{CalorieRequirementTable, Catalog};
use reqwest::{Method, StatusCode};
use serde_json::Value;

pub struct Server {
    pub base: String,
    pub state: AppState,
    rt: tokio::runtime::Runtime,
}

impl Server {
    pub fn start(options: ServerOptions) -> Server {
        Self::start_with_store(options, Arc::new(MemoryStore::new()))
    }

    pub fn start_with_store(options: ServerOptions, store: Arc<dyn ProfileStore>) -> Server {
        let state = AppState::new(Catalog::builtin(), CalorieRequirementTable::builtin(), store, options).unwrap();
        let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
        let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        rt.spawn(foodcal_api::serve(listener, state.clone()));
        Server { base, state, rt }
    }

    pub fn client(&self) -> Client {
        Client {
            base: self.base.clone(),
            http: reqwest::Client::new(),
        }
    }

    pub fn block_on<F: std::future::Future>(&self, f: F) -> F::Output {
        self.rt.block_on(f)
    }
}

#[derive(Clone)]
pub struct Client {
    pub base: String,
    pub http: reqwest::Client,
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: reqwest::header::HeaderMap,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.text))
    }
}

impl Client {
    pub async fn send(&self, method: Method, path: &str, token: Option<&str>, body: Option<String>) -> Reply {
        let mut req = self.http.request(method, format!("{}{}", self.base, path));
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        if let Some(b) = body {
            req = req.header("content-type", "application/json").body(b);
        }
        let resp = req.send().await.unwrap();
        Reply {
            status: resp.status(),
            headers: resp.headers().clone(),
            text: resp.text().await.unwrap(),
        }
    }

    pub async fn get(&self, path: &str, token: Option<&str>) -> Reply {
        self.send(Method::GET, path, token, None).await
    }

    pub async fn post(&self, path: &str, token: Option<&str>, body: &Value) -> Reply {
        self.send(Method::POST, path, token, Some(body.to_string())).await
    }

    pub async fn token(&self) -> String {
        let r = self.send(Method::POST, "/v1/auth/anonymous", None, None).await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text);
        r.json()["token"].as_str().unwrap().to_string()
    }

    /// Submission built from the hint plans of both genders.
    pub async fn hint_submission(&self, token: &str, level: u32) -> Value {
        let plan = |g: &str| {
            let path = format!("/v1/levels/{level}/hint?gender={g}");
            async move {
                let r = self.get(&path, Some(token)).await;
                assert_eq!(r.status, StatusCode::OK, "{}", r.text);
                r.json()
            }
        };
        let (m, f) = (plan("male").await, plan("female").await);
        let picks = |h: &Value| {
            serde_json::json!({
                "breakfast": h["plan"]["breakfast"]["picks"],
                "lunch": h["plan"]["lunch"]["picks"],
                "dinner": h["plan"]["dinner"]["picks"],
            })
        };
        serde_json::json!({ "level": level, "male": picks(&m), "female": picks(&f) })
    }
}

pub fn assert_error(r: &Reply, status: u16, code: &str) {
    assert_eq!(r.status.as_u16(), status, "{}", r.text);
    let body = r.json();
    assert_eq!(body["code"], code, "{}", r.text);
    assert!(body["message"].as_str().is_some_and(|m| !m.is_empty()));
}
