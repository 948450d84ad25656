import { describe, expect, it } from "vitest";
import { ApiClient, FetchLike, ServiceError } from "../src/api.js";

function fakeFetch(
    handler: (input: string, init?: RequestInit) => { status: number; body: unknown },
): { impl: FetchLike; calls: { input: string; init?: RequestInit }[] } {
    const calls: { input: string; init?: RequestInit }[] = [];
    const impl: FetchLike = async (input, init) => {
        calls.push({ input, init });
        const { status, body } = handler(input, init);
        return new Response(JSON.stringify(body), {
            status,
            headers: { "content-type": "application/json" },
        });
    };
    return { impl, calls };
}

describe("api client", () => {
    it("posts the create payload as JSON and returns the session doc", async () => {
        const doc = { id: "s1", rounds: [] };
        const { impl, calls } = fakeFetch(() => ({ status: 200, body: doc }));
        const api = new ApiClient("http://svc", impl);
        const result = await api.createSession({ text: "rain", w: 1.0 });
        expect(result).toEqual(doc);
        expect(calls[0].input).toBe("http://svc/sessions");
        expect(calls[0].init?.method).toBe("POST");
        expect(JSON.parse(calls[0].init?.body as string)).toEqual({
            text: "rain",
            w: 1.0,
        });
    });

    it("raises ServiceError with the flat error body on non-2xx", async () => {
        const { impl } = fakeFetch(() => ({
            status: 422,
            body: { code: "validation_error", message: "w out of range", field: "w" },
        }));
        const api = new ApiClient("http://svc", impl);
        await expect(api.select("s1", "fx", 4.0)).rejects.toMatchObject({
            status: 422,
            body: { code: "validation_error", field: "w" },
        });
        await expect(api.select("s1", "fx", 4.0)).rejects.toBeInstanceOf(
            ServiceError,
        );
    });

    it("omits w from the select body when not given", async () => {
        const { impl, calls } = fakeFetch(() => ({ status: 200, body: {} }));
        const api = new ApiClient("http://svc", impl);
        await api.select("s1", "fx");
        expect(JSON.parse(calls[0].init?.body as string)).toEqual({
            effect_id: "fx",
        });
    });

    it("encodes the preview sample cap in the query string", async () => {
        const { impl, calls } = fakeFetch(() => ({
            status: 200,
            body: { effect_id: "fx", samples: [] },
        }));
        const api = new ApiClient("http://svc", impl);
        await api.preview("fx", 8);
        expect(calls[0].input).toBe("http://svc/effects/fx/preview?max=8");
    });
});
