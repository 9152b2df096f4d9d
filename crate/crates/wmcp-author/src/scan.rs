//! HTML scanning: suggest a draft document from an existing page.
//!
//! Deterministic by construction: a fixed role-mapping table, a fixed
//! selector preference order (#id, then [name=], then an nth-of-type
//! path), and no inference. Ambiguous mappings are kept but flagged in
//! the suggestion's confidence notes.

use std::collections::{HashMap, HashSet};

use scraper::{ElementRef, Html, Selector};
use wmcp_core::{
    ActionSpec, ElementDescriptor, EndpointRef, HttpVerb, Role, RoleCategory, SchemaVersion,
    WmcpDocument,
};

use crate::error::AuthorError;

/// A draft document plus notes about mappings that deserve human review.
#[derive(Debug, Clone)]
pub struct ScanSuggestion {
    pub document: WmcpDocument,
    /// `(selector, note)` pairs for ambiguous or skipped mappings.
    pub confidence_notes: Vec<(String, String)>,
}

/// Scan a page and suggest one descriptor per interactive element.
///
/// Forms containing a mapped submit button are represented through that
/// button's action; only button-less forms get a `region.form` descriptor.
pub fn scan_html(html: &[u8]) -> Result<ScanSuggestion, AuthorError> {
    let text = std::str::from_utf8(html)
        .map_err(|e| AuthorError::UnparseableHtml(format!("not UTF-8: {e}")))?;
    let dom = Html::parse_document(text);

    let mut scanner = Scanner {
        dom: &dom,
        labels: label_map(&dom),
        used_names: HashSet::new(),
        used_selectors: HashSet::new(),
        elements: Vec::new(),
        notes: Vec::new(),
    };
    scanner.run();

    let context = page_context(&dom);
    Ok(ScanSuggestion {
        document: WmcpDocument {
            version: SchemaVersion::V0_2,
            context,
            elements: scanner.elements,
            security: None,
        },
        confidence_notes: scanner.notes,
    })
}

struct Scanner<'a> {
    dom: &'a Html,
    labels: HashMap<String, String>,
    used_names: HashSet<String>,
    used_selectors: HashSet<String>,
    elements: Vec<ElementDescriptor>,
    notes: Vec<(String, String)>,
}

impl<'a> Scanner<'a> {
    fn run(&mut self) {
        let interactive =
            Selector::parse("input, button, select, textarea, form, a").expect("static selector");
        let candidates: Vec<ElementRef<'a>> = self.dom.select(&interactive).collect();
        for el in candidates {
            self.visit(el);
        }
    }

    fn visit(&mut self, el: ElementRef<'a>) {
        let tag = el.value().name();
        match tag {
            "input" => self.visit_input(el),
            "button" => self.visit_button(el),
            "select" => self.push(el, Role::new(RoleCategory::Select, "single"), true, None),
            "textarea" => self.push(el, Role::new(RoleCategory::Input, "textarea"), true, None),
            "a" => {
                if el.value().attr("href").is_some_and(|h| !h.trim().is_empty()) {
                    self.push(el, Role::new(RoleCategory::Link, "nav"), false, None);
                }
            }
            "form" => self.visit_form(el),
            _ => {}
        }
    }

    fn visit_input(&mut self, el: ElementRef<'a>) {
        let input_type = el
            .value()
            .attr("type")
            .map(|t| t.to_ascii_lowercase())
            .unwrap_or_else(|| "text".into());
        match input_type.as_str() {
            "text" | "email" | "search" => {
                self.push(el, Role::new(RoleCategory::Input, "text"), true, None)
            }
            "password" => self.push(el, Role::new(RoleCategory::Input, "password"), true, None),
            "checkbox" => self.push(el, Role::new(RoleCategory::Input, "checkbox"), true, None),
            "submit" => self.visit_button(el),
            "hidden" => {} // not interactive; never suggested
            other => {
                let selector = self.selector_for(el);
                self.notes
                    .push((selector, format!("unmapped input type {other:?}; skipped")));
            }
        }
    }

    fn visit_button(&mut self, el: ElementRef<'a>) {
        let form = enclosing_form(el);
        let is_submit = form.is_some()
            || el
                .value()
                .attr("type")
                .is_some_and(|t| t.eq_ignore_ascii_case("submit"));
        let role = if is_submit {
            Role::new(RoleCategory::Button, "submit")
        } else {
            Role::new(RoleCategory::Button, "generic")
        };
        let action = form.and_then(|f| form_action(f, &mut self.notes, el));
        if !is_submit {
            let selector = self.selector_for(el);
            self.notes
                .push((selector, "button outside any form; role is a guess".into()));
        }
        self.push(el, role, false, action);
    }

    fn visit_form(&mut self, el: ElementRef<'a>) {
        // Represented by its submit button when one exists.
        let submit =
            Selector::parse("button, input[type=submit], input[type=\"submit\"]").expect("static");
        let has_submit = el.select(&submit).next().is_some();
        if !has_submit {
            self.push(el, Role::new(RoleCategory::Region, "form"), false, None);
        }
    }

    fn push(
        &mut self,
        el: ElementRef<'a>,
        role: Role,
        wants_name: bool,
        action: Option<ActionSpec>,
    ) {
        let selector = self.selector_for(el);
        if !self.used_selectors.insert(selector.clone()) {
            // Same node reached twice (possible with adoption-agency HTML
            // reshuffling); one descriptor is enough.
            return;
        }
        let name = if wants_name {
            self.derive_name(el)
        } else {
            None
        };
        let description = self.describe(el);
        self.elements.push(ElementDescriptor {
            selector,
            role,
            name,
            action,
            description,
        });
    }

    /// Preference order: `#id`, then `tag[name=..]`, then nth-of-type path.
    fn selector_for(&mut self, el: ElementRef<'a>) -> String {
        if let Some(id) = el.value().attr("id") {
            let candidate = format!("#{id}");
            if self.matches_exactly(&candidate, el) {
                return candidate;
            }
        }
        if let Some(name) = el.value().attr("name") {
            let escaped = name.replace('\\', "\\\\").replace('"', "\\\"");
            let candidate = format!("{}[name=\"{escaped}\"]", el.value().name());
            if self.matches_exactly(&candidate, el) {
                return candidate;
            }
        }
        let path = nth_of_type_path(el);
        self.notes.push((
            path.clone(),
            "no unique id or name; positional selector is layout-sensitive".into(),
        ));
        path
    }

    fn matches_exactly(&self, selector: &str, el: ElementRef<'a>) -> bool {
        let Ok(parsed) = Selector::parse(selector) else {
            return false;
        };
        let mut hits = self.dom.select(&parsed);
        match (hits.next(), hits.next()) {
            (Some(only), None) => only.id() == el.id(),
            _ => false,
        }
    }

    fn derive_name(&mut self, el: ElementRef<'a>) -> Option<String> {
        let source = el.value().attr("id").or_else(|| el.value().attr("name"))?;
        let base: String = source
            .chars()
            .filter_map(|c| {
                if c.is_ascii_alphanumeric() || c == '_' {
                    Some(c.to_ascii_uppercase())
                } else {
                    None
                }
            })
            .collect();
        if base.is_empty() {
            return None;
        }
        let mut name = base.clone();
        let mut n = 1;
        while !self.used_names.insert(name.clone()) {
            n += 1;
            name = format!("{base}_{n}");
        }
        Some(name)
    }

    fn describe(&self, el: ElementRef<'a>) -> Option<String> {
        if let Some(label) = el.value().attr("aria-label") {
            return sanitize_text(label);
        }
        if let Some(id) = el.value().attr("id") {
            if let Some(label) = self.labels.get(id) {
                return sanitize_text(label);
            }
        }
        if let Some(placeholder) = el.value().attr("placeholder") {
            return sanitize_text(placeholder);
        }
        match el.value().name() {
            "button" | "a" => sanitize_text(&el.text().collect::<String>()),
            "input" => el.value().attr("value").and_then(sanitize_text),
            _ => None,
        }
    }
}

fn enclosing_form(el: ElementRef<'_>) -> Option<ElementRef<'_>> {
    let mut node = el.parent()?;
    loop {
        if let Some(parent_el) = ElementRef::wrap(node) {
            if parent_el.value().name() == "form" {
                return Some(parent_el);
            }
        }
        node = node.parent()?;
    }
}

fn form_action(
    form: ElementRef<'_>,
    notes: &mut Vec<(String, String)>,
    button: ElementRef<'_>,
) -> Option<ActionSpec> {
    let kind = match form.value().attr("method") {
        Some(m) if m.eq_ignore_ascii_case("post") => HttpVerb::Post,
        _ => HttpVerb::Get,
    };
    let action = form.value().attr("action").map(str::trim).unwrap_or("");
    if action.is_empty() || action.chars().any(|c| c.is_whitespace() || c.is_control()) {
        let selector = button
            .value()
            .attr("id")
            .map(|id| format!("#{id}"))
            .unwrap_or_else(|| nth_of_type_path(button));
        notes.push((selector, "form has no usable action attribute".into()));
        return None;
    }
    Some(ActionSpec {
        kind,
        endpoint: EndpointRef::Literal(action.to_owned()),
        csrf_tag: None,
        payload_jwe: None,
    })
}

/// Positional CSS path: `html > body > form:nth-of-type(1) > ...`.
fn nth_of_type_path(el: ElementRef<'_>) -> String {
    let mut segments = Vec::new();
    let mut current = Some(el);
    while let Some(node) = current {
        let tag = node.value().name();
        if tag == "html" {
            segments.push("html".to_owned());
            break;
        }
        let position = 1 + node
            .prev_siblings()
            .filter_map(ElementRef::wrap)
            .filter(|sib| sib.value().name() == tag)
            .count();
        segments.push(format!("{tag}:nth-of-type({position})"));
        current = node.parent().and_then(ElementRef::wrap);
    }
    segments.reverse();
    segments.join(" > ")
}

fn label_map(dom: &Html) -> HashMap<String, String> {
    let mut map = HashMap::new();
    let labels = Selector::parse("label[for]").expect("static selector");
    for label in dom.select(&labels) {
        if let Some(target) = label.value().attr("for") {
            map.entry(target.to_owned())
                .or_insert_with(|| label.text().collect::<String>());
        }
    }
    map
}

fn page_context(dom: &Html) -> String {
    let title = Selector::parse("title").expect("static selector");
    dom.select(&title)
        .next()
        .and_then(|t| sanitize_text(&t.text().collect::<String>()))
        .unwrap_or_else(|| "Scanned page".to_owned())
}

/// Collapse whitespace, drop markup/control characters, cap at 160 chars.
fn sanitize_text(raw: &str) -> Option<String> {
    let cleaned: String = raw
        .chars()
        .map(|c| if c.is_whitespace() { ' ' } else { c })
        .filter(|c| !matches!(c, '<' | '>' | '`') && !c.is_control())
        .collect();
    let collapsed = cleaned.split_whitespace().collect::<Vec<_>>().join(" ");
    if collapsed.is_empty() {
        return None;
    }
    Some(collapsed.chars().take(160).collect())
}
