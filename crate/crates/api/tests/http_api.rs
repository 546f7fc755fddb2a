mod common;

use std::sync::Arc;

use common::{assert_error, Server};
use foodcal_api::ServerOptions;
use foodcal_core::store::{FileStore, PlayerToken, ProfileStore};
use foodcal_core::SelectionConstraints;
use reqwest::Method;
use serde_json::{json, Value};

#[test]
fn anonymous_tokens_and_empty_profile() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        let a = api.token().await;
        let b = api.token().await;
        assert_ne!(a, b);
        for t in [&a, &b] {
            assert_eq!(t.len(), 32);
            assert!(t.bytes().all(|c| c.is_ascii_digit() || (b'a'..=b'f').contains(&c)));
        }
        let profile = api.get("/v1/profile", Some(&a)).await;
        assert_eq!(profile.status, 200);
        let p = profile.json();
        assert_eq!((p["levels_tried"].as_u64(), p["levels_passed"].as_u64()), (Some(0), Some(0)));
        assert_eq!(p["total_levels"], 96);
    });
}

#[test]
fn auth_is_required() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        assert_error(&api.get("/v1/profile", None).await, 401, "unknown_token");
        assert_error(&api.get("/v1/profile", Some("not-a-token")).await, 401, "unknown_token");
        let stranger = "0123456789abcdef0123456789abcdef";
        assert_error(&api.get("/v1/profile", Some(stranger)).await, 401, "unknown_token");
        assert_error(&api.get("/v1/levels/1", Some(stranger)).await, 401, "unknown_token");
        let sub = json!({"male": {}, "female": {}});
        assert_error(&api.post("/v1/levels/1/submit", Some(stranger), &sub).await, 401, "unknown_token");
    });
}

#[test]
fn levels_are_fixed_and_bounded() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        let t = api.token().await;
        let first = api.get("/v1/levels/1", Some(&t)).await;
        assert_eq!(first.status, 200);
        let level = first.json();
        assert_eq!(level["level"], 1);
        assert_eq!(level["age"], 3);
        assert_eq!(level["windows"].as_array().unwrap().len(), 6);
        assert!(level["male_target"].as_u64().unwrap() > 0);
        assert!(level["female_target"].as_u64().unwrap() > 0);
        assert_eq!(api.get("/v1/levels/1", Some(&t)).await.text, first.text);
        assert_eq!(api.get("/v1/levels/96", Some(&t)).await.json()["age"], 98);
        for bad in ["97", "0", "-1", "abc"] {
            assert_error(&api.get(&format!("/v1/levels/{bad}"), Some(&t)).await, 404, "not_found");
        }
    });
}

#[test]
fn submissions_score_and_count_attempts() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        let t = api.token().await;
        let sub = api.hint_submission(&t, 1).await;
        let mut last = 0;
        for expected in 1..=3 {
            let r = api.post("/v1/levels/1/submit", Some(&t), &sub).await;
            assert_eq!(r.status, 200, "{}", r.text);
            let body = r.json();
            assert_eq!(body["attempt_number"], expected);
            assert_eq!(body["level_number"], 1);
            assert_eq!(body["profile"]["total_attempts"], expected);
            let stars = body["total_stars"].as_u64().unwrap();
            assert_eq!(stars, body["male"]["stars"].as_u64().unwrap() + body["female"]["stars"].as_u64().unwrap());
            assert_eq!(body["passed"], stars >= 4);
            last = stars;
        }
        let p = api.get("/v1/profile", Some(&t)).await.json();
        assert_eq!(p["levels_tried"], 1);
        assert_eq!(p["best_stars"]["1"], last);
    });
}

#[test]
fn exact_target_plans_earn_six_stars() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        let t = api.token().await;
        // find a level whose targets are hit exactly for both genders
        let mut found = None;
        for n in 1..=96u32 {
            let exact = |g: &'static str| {
                let api = api.clone();
                let t = t.clone();
                async move {
                    let h = api.get(&format!("/v1/levels/{n}/hint?gender={g}"), Some(&t)).await.json();
                    h["plan"]["day_total_kcal"] == h["required_kcal"]
                }
            };
            if exact("male").await && exact("female").await {
                found = Some(n);
                break;
            }
        }
        let n = found.expect("some level has exactly reachable targets");
        let sub = api.hint_submission(&t, n).await;
        let body = api.post(&format!("/v1/levels/{n}/submit"), Some(&t), &sub).await.json();
        assert_eq!(body["total_stars"], 6);
        assert_eq!(body["passed"], true);
        assert_eq!(api.get("/v1/profile", Some(&t)).await.json()["levels_passed"], 1);
    });
}

#[test]
fn illegal_and_malformed_submissions() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        let t = api.token().await;
        let good = api.hint_submission(&t, 2).await;

        let mut too_many = good.clone();
        too_many["male"]["lunch"][0]["quantity"] = json!(11);
        let r = api.post("/v1/levels/2/submit", Some(&t), &too_many).await;
        assert_error(&r, 422, "illegal_pick");
        assert!(r.json()["message"].as_str().unwrap().contains("quantity 11"));

        let mut foreign = good.clone();
        foreign["female"]["dinner"][0]["item_id"] = json!("pizza");
        let r = api.post("/v1/levels/2/submit", Some(&t), &foreign).await;
        assert_error(&r, 422, "illegal_pick");
        assert!(r.json()["message"].as_str().unwrap().contains("pizza"));

        let mut empty = good.clone();
        empty["male"]["breakfast"] = json!([]);
        assert_error(&api.post("/v1/levels/2/submit", Some(&t), &empty).await, 422, "illegal_pick");

        let r = api.send(Method::POST, "/v1/levels/2/submit", Some(&t), Some("{not json".into())).await;
        assert_error(&r, 400, "bad_request");
        assert_error(&api.post("/v1/levels/2/submit", Some(&t), &json!({"male": 3})).await, 400, "bad_request");
        let mut elsewhere = good.clone();
        elsewhere["level"] = json!(5);
        assert_error(&api.post("/v1/levels/2/submit", Some(&t), &elsewhere).await, 400, "bad_request");
        assert_error(&api.post("/v1/levels/97/submit", Some(&t), &good).await, 404, "not_found");

        // none of the rejected submissions touched the profile
        let p = api.get("/v1/profile", Some(&t)).await.json();
        assert_eq!(p["total_attempts"], 0);

        // the level field may be left out
        let mut implicit = good.clone();
        implicit.as_object_mut().unwrap().remove("level");
        assert_eq!(api.post("/v1/levels/2/submit", Some(&t), &implicit).await.status, 200);
    });
}

#[test]
fn hints_and_their_switch() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        let t = api.token().await;
        for n in [1, 40, 96] {
            for g in ["male", "female", "F"] {
                let h = api.get(&format!("/v1/levels/{n}/hint?gender={g}"), Some(&t)).await;
                assert_eq!(h.status, 200, "{}", h.text);
                assert!(h.json()["projected_stars"].as_u64().unwrap() >= 1);
            }
        }
        assert_error(&api.get("/v1/levels/1/hint?gender=other", Some(&t)).await, 400, "bad_request");
        assert_error(&api.get("/v1/levels/1/hint", Some(&t)).await, 400, "bad_request");
        assert_error(&api.get("/v1/levels/1/hint?gender=male", None).await, 401, "unknown_token");
    });

    let plain = Server::start(ServerOptions {
        hints_enabled: false,
        ..ServerOptions::default()
    });
    let api = plain.client();
    plain.block_on(async {
        let t = api.token().await;
        assert_error(&api.get("/v1/levels/1/hint?gender=male", Some(&t)).await, 404, "not_found");
        assert_eq!(api.get("/v1/meta", None).await.json()["hints_enabled"], false);
    });
}

#[test]
fn catalog_and_meta() {
    let narrow = SelectionConstraints {
        min_items_per_window: 1,
        max_items_per_window: 2,
        max_quantity_per_item: 8,
    };
    let server = Server::start(ServerOptions::default().with_constraints(narrow));
    let api = server.client();
    server.block_on(async {
        let catalog = api.get("/v1/catalog", None).await.json();
        let items = catalog.as_array().unwrap();
        assert_eq!(items.len(), 72);
        for key in ["id", "name", "category", "unit", "kcal_per_unit"] {
            assert!(items[0].get(key).is_some(), "missing {key}");
        }
        let meta = api.get("/v1/meta", None).await.json();
        assert_eq!(meta["level_count"], 96);
        assert_eq!((meta["age_min"].as_u64(), meta["age_max"].as_u64()), (Some(3), Some(98)));
        assert_eq!(meta["pass_threshold"], 4);
        assert_eq!(
            meta["constraints"],
            json!({"min_items_per_window": 1, "max_items_per_window": 2, "max_quantity_per_item": 8})
        );
        assert_eq!(meta["hints_enabled"], true);
    });
}

#[test]
fn unknown_routes_and_methods_answer_json() {
    let server = Server::start(ServerOptions::default());
    let api = server.client();
    server.block_on(async {
        assert_error(&api.get("/v2/anything", None).await, 404, "not_found");
        assert_error(&api.get("/v1/auth/anonymous", None).await, 405, "bad_request");
    });
}

#[test]
fn cors_allows_the_configured_origin() {
    let server = Server::start(ServerOptions {
        cors_origin: Some("http://localhost:5173".into()),
        ..ServerOptions::default()
    });
    let api = server.client();
    server.block_on(async {
        let resp = api
            .http
            .request(Method::OPTIONS, format!("{}/v1/profile", api.base))
            .header("origin", "http://localhost:5173")
            .header("access-control-request-method", "GET")
            .header("access-control-request-headers", "authorization")
            .send()
            .await
            .unwrap();
        assert!(resp.status().is_success());
        assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:5173");
        let other = api
            .http
            .get(format!("{}/v1/meta", api.base))
            .header("origin", "http://evil.example")
            .send()
            .await
            .unwrap();
        // the header names the configured origin only, so browsers reject others
        assert_eq!(other.headers()["access-control-allow-origin"], "http://localhost:5173");
    });
}

#[test]
fn concurrent_submits_on_file_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(FileStore::open(dir.path()).unwrap());
    let server = Server::start_with_store(ServerOptions::default(), store);
    let api = server.client();
    let (t, ok) = server.block_on(async {
        let t = api.token().await;
        let sub = api.hint_submission(&t, 3).await;
        let tasks: Vec<_> = (0..12)
            .map(|_| {
                let api = api.clone();
                let t = t.clone();
                let sub = sub.clone();
                tokio::spawn(async move { api.post("/v1/levels/3/submit", Some(&t), &sub).await })
            })
            .collect();
        let mut ok = 0;
        for task in tasks {
            let r = task.await.unwrap();
            match r.status.as_u16() {
                200 => ok += 1,
                409 => assert_error(&r, 409, "version_conflict"),
                s => panic!("unexpected {s}: {}", r.text),
            }
        }
        let attempts: Value = api.get("/v1/profile", Some(&t)).await.json()["attempt_counts"]["3"].clone();
        assert_eq!(attempts, ok);
        assert!(ok >= 1);
        (t, ok)
    });
    drop(server);
    let reopened = FileStore::open(dir.path()).unwrap();
    let stored = reopened.get_profile(&PlayerToken::parse(&t).unwrap()).unwrap();
    assert_eq!(stored.profile.attempt_counts[&3], ok);
}
