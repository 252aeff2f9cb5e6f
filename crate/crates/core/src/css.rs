//! Minimal inline `style` attribute editing.

use crate::svg::ElementNode;

fn declarations(style: &str) -> Vec<(String, String)> {
    style
        .split(';')
        .filter_map(|decl| {
            let (k, v) = decl.split_once(':')?;
            let (k, v) = (k.trim(), v.trim());
            (!k.is_empty()).then(|| (k.to_string(), v.to_string()))
        })
        .collect()
}

fn render(decls: &[(String, String)]) -> String {
    decls
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn style_get(el: &ElementNode, prop: &str) -> Option<String> {
    declarations(el.attr("style")?)
        .into_iter()
        .rev()
        .find(|(k, _)| k == prop)
        .map(|(_, v)| v)
}

/// Sets `prop` as the last declaration, dropping any earlier ones.
pub fn style_set(el: &mut ElementNode, prop: &str, value: &str) {
    let mut decls = el.attr("style").map(declarations).unwrap_or_default();
    decls.retain(|(k, _)| k != prop);
    decls.push((prop.to_string(), value.to_string()));
    el.set_attr("style", render(&decls));
}

/// Rewrites every declaration value in place; `f` gets (property, value).
pub fn style_map(el: &mut ElementNode, mut f: impl FnMut(&str, &str) -> Option<String>) {
    let Some(style) = el.attr("style") else {
        return;
    };
    let decls: Vec<(String, String)> = declarations(style)
        .into_iter()
        .map(|(k, v)| {
            let v = f(&k, &v).unwrap_or(v);
            (k, v)
        })
        .collect();
    el.set_attr("style", render(&decls));
}

/// Style property if present, otherwise the presentation attribute.
pub fn effective_property(el: &ElementNode, prop: &str) -> Option<String> {
    style_get(el, prop).or_else(|| el.attr(prop).map(str::to_string))
}
