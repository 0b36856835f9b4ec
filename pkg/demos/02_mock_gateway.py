"""The model gateway: templates, a scripted backend, response caching."""

from tracer.gateway import Gateway, MockScript, ResponseCache, TemplateCatalog

catalog = TemplateCatalog.bundled()
print(f"Bundled prompt templates ({len(catalog.ids())}):")
print("  " + ", ".join(catalog.ids()))

print()
print("A mock script answers by template id and optional prompt substring:")
script = MockScript.from_dict(
    {
        "rules": [
            {"template": "nli", "contains": "part-time", "response": "B"},
            {"template": "nli", "response": "C"},
        ],
        "embeddings": [{"text": "jobs grew", "vector": [1.0, 0.0]}],
    }
)
gateway = Gateway(backend=script, cache=ResponseCache())

first = gateway.run("nli", premise="Most new roles were part-time.", hypothesis="Jobs grew.")
second = gateway.run("nli", premise="The sun rose.", hypothesis="Jobs grew.")
print(f"  part-time premise -> {first}")
print(f"  unrelated premise -> {second}")

print()
print("Identical requests are served from the cache, not the backend:")
gateway.run("nli", premise="Most new roles were part-time.", hypothesis="Jobs grew.")
print(f"  backend completions: {len([c for c in script.call_log if c.kind == 'completion'])}")
print(f"  counters: {gateway.counters.snapshot()}")

print()
vector = gateway.embed("jobs grew")
print(f"embed('jobs grew') -> {vector.vector} from model {vector.model_id!r}")
