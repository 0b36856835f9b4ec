"""Evidence alignment on the shipped scenario claim."""

from tracer.alignment import align_evidence, hidden_pool, presented_pool
from tracer.fixtures import load_scenario_record, make_scenario_gateway

record = load_scenario_record()
gateway = make_scenario_gateway()

print(f"Claim: {record.claim}")
print()

aligned = align_evidence(
    gateway, record.claim, "\n".join(record.ruling), record.evidence
)
for item in aligned:
    similarity = "" if item.similarity is None else f"  (sim {item.similarity:.2f})"
    print(f"  [{item.label.value:<10}] {item.sentence}{similarity}")

print()
print(f"Presented pool: {len(presented_pool(aligned))} sentence(s)")
print(f"Hidden pool:    {len(hidden_pool(aligned))} sentence(s)")
print()
print("The hidden pool is what downstream retrieval searches for context")
print("the claim left out.")
