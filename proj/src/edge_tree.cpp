#include "nbg/edge_tree.hpp"

#include <limits>

namespace nbg::edge_tree {

namespace {

Key key_of(const EdgeNode* n) { return n->payload.load(std::memory_order_acquire)->key; }

// Replaces the node's op word. On success the previous descriptor loses the
// reference that word held.
bool install(Context& ctx, EdgeNode* node, Word expected, Word desired) {
    if (!node->op.compare_exchange_strong(expected, desired, std::memory_order_acq_rel)) return false;
    if (Descriptor* prev = descriptor_of(expected)) defer_release(ctx, prev);
    return true;
}

// Installs a payload swap on a node whose op word still equals node_op.
bool swap_payload(Context& ctx, EdgeNode* node, Word node_op, Payload* seen, Payload* fresh) {
    auto* op = new WeightCasOp(seen, fresh);
    if (!install(ctx, node, node_op, with_flag(op, kChildCas))) {
        release(op);
        return false;
    }
    ctx.step(Step::Published);
    help_weight_cas(ctx, op, node);
    return true;
}

// Marks a node with at most one child and unlinks it.
bool mark_and_excise(Context& ctx, const FindResult& fr) {
    Word expect = fr.curr_op;
    if (!fr.curr->op.compare_exchange_strong(expect, with_flag(fr.curr_op, kMarked), std::memory_order_acq_rel)) {
        return false;
    }
    ctx.step(Step::Published);
    help_marked(ctx, fr.pred, fr.pred_op, fr.curr);
    return true;
}

}  // namespace

FindResult find(Context& ctx, Key key, EdgeNode* aux_root, EdgeNode* root) {
    for (;;) {
        FindStatus result = FindStatus::NotFoundRight;
        EdgeNode* pred = nullptr;
        Word pred_op = 0;
        EdgeNode* curr = aux_root;
        Word curr_op = curr->op.load(std::memory_order_acquire);
        if (flag_of(curr_op) != kNone) {
            if (aux_root == root) {
                help_child_cas(ctx, static_cast<ChildCasOp*>(descriptor_of(curr_op)), curr);
                continue;
            }
            return {FindStatus::Abort, nullptr, 0, curr, curr_op};
        }
        Word next = curr->right.load(std::memory_order_acquire);
        EdgeNode* last_right = curr;
        Word last_right_op = curr_op;
        bool restart = false;
        while (!is_null_child(next)) {
            pred = curr;
            pred_op = curr_op;
            curr = as_edge(next);
            curr_op = curr->op.load(std::memory_order_acquire);
            if (flag_of(curr_op) != kNone) {
                help(ctx, pred, pred_op, curr, curr_op);
                restart = true;
                break;
            }
            Key ck = key_of(curr);
            if (key < ck) {
                result = FindStatus::NotFoundLeft;
                next = curr->left.load(std::memory_order_acquire);
            } else if (key > ck) {
                result = FindStatus::NotFoundRight;
                next = curr->right.load(std::memory_order_acquire);
                last_right = curr;
                last_right_op = curr_op;
            } else {
                result = FindStatus::Found;
                break;
            }
        }
        if (restart) continue;
        if (result != FindStatus::Found && last_right_op != last_right->op.load(std::memory_order_acquire)) continue;
        if (curr->op.load(std::memory_order_acquire) != curr_op) continue;
        return {result, pred, pred_op, curr, curr_op};
    }
}

void help(Context& ctx, EdgeNode* pred, Word pred_op, EdgeNode* curr, Word curr_op) {
    Descriptor* d = descriptor_of(curr_op);
    switch (flag_of(curr_op)) {
        case kChildCas:
            if (d->kind == DescriptorKind::Child) {
                help_child_cas(ctx, static_cast<ChildCasOp*>(d), curr);
            } else {
                help_weight_cas(ctx, static_cast<WeightCasOp*>(d), curr);
            }
            break;
        case kRelocate: help_relocate(ctx, static_cast<RelocateOp*>(d), pred, pred_op, curr); break;
        case kMarked: help_marked(ctx, pred, pred_op, curr); break;
        default: break;
    }
}

void help_child_cas(Context& ctx, ChildCasOp* op, EdgeNode* dest) {
    auto& field = op->is_left ? dest->left : dest->right;
    Word expect = op->expected;
    if (field.compare_exchange_strong(expect, op->update, std::memory_order_acq_rel) && !is_null_child(op->expected)) {
        defer_release(ctx, as_edge(op->expected));
    }
    Word flagged = with_flag(op, kChildCas);
    dest->op.compare_exchange_strong(flagged, with_flag(op, kNone), std::memory_order_acq_rel);
}

void help_weight_cas(Context& ctx, WeightCasOp* op, EdgeNode* node) {
    Payload* expect = op->expected;
    if (node->payload.compare_exchange_strong(expect, op->update, std::memory_order_acq_rel)) {
        retain(op->update);
        defer_release(ctx, op->expected);
    }
    Word flagged = with_flag(op, kChildCas);
    node->op.compare_exchange_strong(flagged, with_flag(op, kNone), std::memory_order_acq_rel);
}

void help_marked(Context& ctx, EdgeNode* pred, Word pred_op, EdgeNode* curr) {
    Word left = curr->left.load(std::memory_order_acquire);
    Word right = curr->right.load(std::memory_order_acquire);
    Word replacement;
    if (is_null_child(left)) {
        replacement = is_null_child(right) ? ctx.fresh_null() : right;
    } else {
        replacement = left;
    }
    bool is_left = pred->left.load(std::memory_order_acquire) == as_word(curr);
    auto* op = new ChildCasOp(is_left, as_word(curr), replacement);
    if (install(ctx, pred, pred_op, with_flag(op, kChildCas))) {
        help_child_cas(ctx, op, pred);
    } else {
        release(op);
    }
}

bool help_relocate(Context& ctx, RelocateOp* op, EdgeNode* pred, Word pred_op, EdgeNode* curr) {
    int seen = op->state.load(std::memory_order_acquire);
    if (seen == kOngoing) {
        Word expect = op->dest_op;
        const Word mine = with_flag(op, kRelocate);
        bool won = op->dest->op.compare_exchange_strong(expect, mine, std::memory_order_acq_rel);
        if (won) {
            if (Descriptor* prev = descriptor_of(op->dest_op)) defer_release(ctx, prev);
        }
        if (won || expect == mine) {
            int ongoing = kOngoing;
            op->state.compare_exchange_strong(ongoing, kSuccessful, std::memory_order_acq_rel);
            seen = kSuccessful;
        } else {
            int ongoing = kOngoing;
            if (op->state.compare_exchange_strong(ongoing, kFailed, std::memory_order_acq_rel)) {
                seen = kFailed;
                // The reference reserved for the destination's op word is unused.
                defer_release(ctx, op);
            } else {
                seen = ongoing;
            }
        }
    }
    const bool ok = seen == kSuccessful;
    if (ok) {
        Payload* expect = op->dest_payload;
        if (op->dest->payload.compare_exchange_strong(expect, op->replace_payload, std::memory_order_acq_rel)) {
            retain(op->replace_payload);
            defer_release(ctx, op->dest_payload);
        }
        ctx.step(Step::Relocating);
        Word r = with_flag(op, kRelocate);
        op->replace->op.compare_exchange_strong(r, with_flag(op, kMarked), std::memory_order_acq_rel);
        Word d = with_flag(op, kRelocate);
        if (op->dest->op.compare_exchange_strong(d, with_flag(op, kNone), std::memory_order_acq_rel)) op->detach(ctx);
    } else {
        Word r = with_flag(op, kRelocate);
        if (op->replace->op.compare_exchange_strong(r, with_flag(op, kNone), std::memory_order_acq_rel)) {
            op->detach(ctx);
        }
    }
    if (op->dest == curr) return ok;
    if (ok) {
        if (op->dest == pred) pred_op = with_flag(op, kNone);
        help_marked(ctx, pred, pred_op, curr);
    }
    return ok;
}

PutResult insert_or_update(Context& ctx, VertexNode& owner, VertexNode& dest, double weight) {
    const Key key = dest.key;
    for (;;) {
        if (owner.marked() || dest.marked()) return {PutOutcome::VertexGone, kInfinity};
        FindResult fr = find(ctx, key, &owner.root, &owner.root);
        if (fr.status == FindStatus::Found) {
            Payload* seen = fr.curr->payload.load(std::memory_order_acquire);
            if (fr.curr->op.load(std::memory_order_acquire) != fr.curr_op) continue;
            if (seen->target == &dest) {
                if (seen->weight == weight) return {PutOutcome::Unchanged, weight};
                owner.oi.begin();
                if (swap_payload(ctx, fr.curr, fr.curr_op, seen, new Payload(key, &dest, weight))) {
                    ctx.step(Step::Applied);
                    owner.oi.commit();
                    return {PutOutcome::Updated, seen->weight};
                }
                owner.oi.abort();
                continue;
            }
            // Left behind by a removed destination: reuse the node for the new edge.
            if (seen->target->marked()) {
                owner.oi.begin();
                if (swap_payload(ctx, fr.curr, fr.curr_op, seen, new Payload(key, &dest, weight))) {
                    ctx.step(Step::Applied);
                    owner.oi.commit();
                    return {PutOutcome::Inserted, kInfinity};
                }
                owner.oi.abort();
            }
            continue;
        }
        const bool is_left = fr.status == FindStatus::NotFoundLeft;
        auto* node = new EdgeNode(new Payload(key, &dest, weight), ctx.fresh_null(), ctx.fresh_null());
        Word old = is_left ? fr.curr->left.load(std::memory_order_acquire) : fr.curr->right.load(std::memory_order_acquire);
        auto* op = new ChildCasOp(is_left, old, as_word(node));
        owner.oi.begin();
        if (install(ctx, fr.curr, fr.curr_op, with_flag(op, kChildCas))) {
            ctx.step(Step::Published);
            help_child_cas(ctx, op, fr.curr);
            ctx.step(Step::Applied);
            owner.oi.commit();
            return {PutOutcome::Inserted, kInfinity};
        }
        owner.oi.abort();
        release(op);
        release(node);
    }
}

RemoveResult remove(Context& ctx, VertexNode& owner, VertexNode& dest) {
    const Key key = dest.key;
    for (;;) {
        if (owner.marked() || dest.marked()) return {false, kInfinity};
        FindResult fr = find(ctx, key, &owner.root, &owner.root);
        if (fr.status != FindStatus::Found) return {false, kInfinity};
        Payload* seen = fr.curr->payload.load(std::memory_order_acquire);
        if (fr.curr->op.load(std::memory_order_acquire) != fr.curr_op) continue;
        const bool leafish = is_null_child(fr.curr->left.load(std::memory_order_acquire)) ||
                             is_null_child(fr.curr->right.load(std::memory_order_acquire));
        if (seen->target != &dest) {
            // Stale edge to a removed vertex: unlink it when cheap, report absent.
            if (seen->target->marked() && leafish) mark_and_excise(ctx, fr);
            return {false, kInfinity};
        }
        if (leafish) {
            owner.oi.begin();
            if (mark_and_excise(ctx, fr)) {
                ctx.step(Step::Applied);
                owner.oi.commit();
                return {true, seen->weight};
            }
            owner.oi.abort();
            continue;
        }
        FindResult succ = find(ctx, key, fr.curr, &owner.root);
        if (succ.status == FindStatus::Abort || fr.curr->op.load(std::memory_order_acquire) != fr.curr_op) continue;
        Payload* moving = succ.curr->payload.load(std::memory_order_acquire);
        if (succ.curr->op.load(std::memory_order_acquire) != succ.curr_op) continue;
        auto* op = new RelocateOp(fr.curr, fr.curr_op, seen, succ.curr, moving);
        owner.oi.begin();
        if (install(ctx, succ.curr, succ.curr_op, with_flag(op, kRelocate))) {
            ctx.step(Step::Published);
            if (help_relocate(ctx, op, succ.pred, succ.pred_op, succ.curr)) {
                ctx.step(Step::Applied);
                owner.oi.commit();
                return {true, seen->weight};
            }
            owner.oi.abort();
            continue;
        }
        owner.oi.abort();
        delete op;
    }
}

Payload* lookup(Context& ctx, VertexNode& owner, Key key) {
    for (;;) {
        FindResult fr = find(ctx, key, &owner.root, &owner.root);
        if (fr.status != FindStatus::Found) return nullptr;
        Payload* p = fr.curr->payload.load(std::memory_order_acquire);
        if (fr.curr->op.load(std::memory_order_acquire) == fr.curr_op) return p;
    }
}

TreeReport inspect(const EdgeNode& root) {
    TreeReport rep;
    std::vector<const EdgeNode*> stack;
    Key last = std::numeric_limits<Key>::min();
    bool first = true;
    Word w = root.right.load(std::memory_order_acquire);
    if (flag_of(root.op.load(std::memory_order_acquire)) != kNone) ++rep.flagged;
    for (;;) {
        while (!is_null_child(w)) {
            const EdgeNode* n = as_edge(w);
            stack.push_back(n);
            w = n->left.load(std::memory_order_acquire);
        }
        if (stack.empty()) break;
        const EdgeNode* n = stack.back();
        stack.pop_back();
        ++rep.nodes;
        Word op = n->op.load(std::memory_order_acquire);
        if (flag_of(op) == kMarked) ++rep.marked;
        else if (flag_of(op) != kNone) ++rep.flagged;
        Key k = n->payload.load(std::memory_order_acquire)->key;
        if (!first && k <= last) rep.ordered = false;
        first = false;
        last = k;
        w = n->right.load(std::memory_order_acquire);
    }
    return rep;
}

}  // namespace nbg::edge_tree
